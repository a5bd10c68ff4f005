"""Reader models"""

from collections.abc import Iterator
from dataclasses import dataclass, field

from app.reader.enums import OperatorType
from app.terms.models import Clause, body_goals, max_serial


INFIX_OPERATORS: dict[str, tuple[int, OperatorType]] = {
    ":-": (1200, OperatorType.XFX),
    ";": (1100, OperatorType.XFY),
    "->": (1050, OperatorType.XFY),
    ",": (1000, OperatorType.XFY),
    "=": (700, OperatorType.XFX),
    "is": (700, OperatorType.XFX),
    "<": (700, OperatorType.XFX),
    ">": (700, OperatorType.XFX),
    ">=": (700, OperatorType.XFX),
    "=<": (700, OperatorType.XFX),
    "+": (500, OperatorType.YFX),
    "-": (500, OperatorType.YFX),
    "*": (400, OperatorType.YFX),
    "/": (400, OperatorType.YFX),
}

PREFIX_OPERATORS: dict[str, tuple[int, OperatorType]] = {
    ":-": (1200, OperatorType.FX),
    "\\+": (900, OperatorType.FY),
}

# Predicates implemented by the engine; programs may not define them.
RESERVED_INDICATORS = frozenset({
    "true/0", "fail/0", "false/0",
    ",/2", ";/2", "->/2", "\\+/1", "call/1",
    "=/2", "var/1", "nonvar/1", "ground/1",
    "is/2", "</2", ">/2", ">=/2", "=</2",
    "assertz/1", "retract/1",
    "catch/3", "throw/1",
    "when/2", "freeze/2",
    "btid/2", "bt_target/1", "backjump/1",
})

MAX_ARITY = 255


@dataclass
class Program:
    """
    A logic program: procedures in first-appearance order, clauses in
    source order, plus the predicates declared dynamic.
    """

    procedures: dict[str, list[Clause]] = field(default_factory=dict)
    dynamic: set[str] = field(default_factory=set)

    def add_clause(self, clause: Clause) -> None:
        self.procedures.setdefault(clause.indicator, []).append(clause)

    def clauses(self, indicator: str) -> list[Clause]:
        return self.procedures.get(indicator, [])

    def defines(self, indicator: str) -> bool:
        return indicator in self.procedures

    @property
    def indicators(self) -> list[str]:
        return list(self.procedures)

    def all_clauses(self) -> Iterator[Clause]:
        for clauses in self.procedures.values():
            yield from clauses

    def max_serial(self) -> int:
        return max_serial(term for clause in self.all_clauses() for term in (clause.head, clause.body))

    def copy(self) -> "Program":
        return Program(
            procedures={pi: list(clauses) for pi, clauses in self.procedures.items()},
            dynamic=set(self.dynamic),
        )

    def uses(self, indicator: str) -> bool:
        """True when some clause body calls `indicator` (control constructs are looked through)."""
        return any(
            goal_indicator == indicator
            for clause in self.all_clauses()
            for goal_indicator in body_goals(clause.body)
        )
