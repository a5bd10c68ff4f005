"""Engine errors"""

from typing import TYPE_CHECKING

from app.reader.formatting import format_term
from app.terms.errors import LabError
from app.terms.models import Term

if TYPE_CHECKING:
    from app.engine.schemas import SolveResult


class EngineError(LabError):
    """
    A run stopped abnormally.

    `result` holds the answers and trace produced before the failure; it is
    attached by `solve`.
    """

    def __init__(self, message: str):
        super().__init__(message)
        self.result: "SolveResult | None" = None


class UncaughtBallError(EngineError):
    """No active catch/3 frame has a catcher unifying with the ball."""

    def __init__(self, ball: Term):
        super().__init__(f"uncaught ball: {format_term(ball)}")
        self.ball = ball


class StepLimitExceeded(EngineError):
    def __init__(self, steps: int):
        super().__init__(f"step limit exceeded after {steps} steps")
        self.steps = steps


class UnknownProcedureError(EngineError):
    def __init__(self, indicator: str):
        super().__init__(f"unknown procedure: {indicator}")
        self.indicator = indicator


class InstantiationError(EngineError):
    def __init__(self, context: str):
        super().__init__(f"instantiation error in {context}")
        self.context = context


class TypeErrorTerm(EngineError):
    def __init__(self, expected: str, culprit: Term, context: str = ""):
        where = f" in {context}" if context else ""
        super().__init__(f"type error{where}: expected {expected}, found {format_term(culprit)}")
        self.expected = expected
        self.culprit = culprit


class DomainErrorTerm(EngineError):
    def __init__(self, domain: str, culprit: Term):
        super().__init__(f"domain error: {format_term(culprit)} is not a valid {domain}")
        self.domain = domain
        self.culprit = culprit


class UnsupportedBuiltinError(EngineError):
    """A builtin was called in a mode that does not provide it."""

    def __init__(self, indicator: str, mode: str):
        super().__init__(f"{indicator} is not available in {mode} mode")
        self.indicator = indicator
        self.mode = mode


class BackjumpTargetError(EngineError):
    """backjump/1 named a target that is not registered on the current stack."""

    def __init__(self, target: Term | None, reason: str = "no live target registered"):
        shown = "?" if target is None else format_term(target)
        super().__init__(f"backjump target {shown}: {reason}")
        self.target = target


class TermTooDeepError(EngineError):
    """A term built by the program is nested beyond what the engine can traverse."""

    def __init__(self, detail: str):
        super().__init__(f"term too deep: {detail}")
        self.detail = detail
