"""LD-resolution engine with catch/throw, native backjumping and delayed goals"""

import logging
import re
from collections.abc import Callable, Iterator
from functools import partial

from app.config.settings import settings
from app.coroutine.logic import blocked_violations, rewake, select_when, throw_with_delays
from app.coroutine.models import WhenAtom
from app.engine.builtins import DETERMINISTIC
from app.engine.enums import Mode, Port, StepOutcome
from app.engine.errors import (
    BackjumpTargetError,
    EngineError,
    InstantiationError,
    StepLimitExceeded,
    TermTooDeepError,
    TypeErrorTerm,
    UncaughtBallError,
    UnknownProcedureError,
    UnsupportedBuiltinError,
)
from app.engine.models import (
    CallFrame,
    CatchFrame,
    DisjFrame,
    ExitCall,
    ExitCatch,
    Frame,
    Goal,
    IteCommit,
    IteFrame,
    NegFrame,
    NegSucceeded,
    TargetRegistry,
)
from app.engine.schemas import Answer, Limits, SolveResult, TraceEvent
from app.reader.formatting import format_term
from app.reader.logic import parse_program, parse_query
from app.reader.models import Program
from app.terms.errors import TermDepthError
from app.terms.logic import Bindings, FreshCounter, copy_term, rename_apart
from app.terms.models import FAIL, Compound, Int, Term, Var, indicator, make_list, max_serial, term_variables

logger = logging.getLogger(__name__)


class Engine:
    """
    One run of a program.

    The state is the active part (`goals`, a linked list of goal cells),
    the blocked part (`blocked`), the frame stack and the binding trail.
    Every user call pushes a CallFrame, even when no clause remains to try.
    """

    def __init__(self, program: Program, mode: Mode | str = Mode.ISO, limits: Limits | None = None):
        self.program = program
        self.mode = Mode(mode)
        self.limits = limits or Limits()
        self.trace_builtins = settings.TRACE_BUILTINS
        self.database = program.copy()
        self.bindings = Bindings()
        self.fresh = FreshCounter()
        self.registry = TargetRegistry()
        self.trace: list[TraceEvent] = []
        self.goals: Goal | None = None
        self.blocked: tuple[WhenAtom, ...] = ()
        self.stack: list[Frame] = []
        self.steps = 0
        self.nodes = 0
        self.target_ids = 0
        self.failing = False
        self.exhausted = False
        self.query: Term | None = None
        self.query_vars: list[Var] = []
        self.found: list[Answer] = []

    # running

    def start(self, query: Term) -> None:
        self.query = query
        self.query_vars = [var for var in term_variables(query) if var.name and not var.name.startswith("_")]
        self.fresh = FreshCounter(1 + max(self.program.max_serial(), max_serial([query])))
        self.goals = Goal(query, None, None)
        logger.debug("run started: mode=%s query=%s", self.mode.value, format_term(query))

    def answers(self, query: Term) -> Iterator[Answer]:
        """Lazily enumerate the answers of `query` in LD order."""
        self.start(query)
        while (outcome := self.step()) is not StepOutcome.EXHAUSTED:
            if outcome is StepOutcome.ANSWER:
                yield self.found[-1]
                if self.limits.max_solutions and len(self.found) >= self.limits.max_solutions:
                    break
        logger.debug("run finished: %d answers in %d steps", len(self.found), self.steps)

    def result(self) -> SolveResult:
        return SolveResult(answers=self.found, trace=self.trace, steps=self.steps, exhausted=self.exhausted)

    def step(self) -> StepOutcome:
        """
        Perform one successor step.

        Raises:
            StepLimitExceeded: When limits.max_steps steps have been taken
            TermTooDeepError: A term could not be traversed
            EngineError: On runtime errors and uncaught balls
        """
        if self.exhausted:
            return StepOutcome.EXHAUSTED
        if self.steps >= self.limits.max_steps:
            raise StepLimitExceeded(self.steps)
        self.steps += 1
        try:
            return self._advance()
        except TermDepthError as error:
            raise TermTooDeepError(error.message) from error
        except RecursionError as error:
            raise TermTooDeepError("nesting exceeds the recursion limit") from error

    def _advance(self) -> StepOutcome:
        if self.failing:
            self.failing = False
            self.backtrack()
            return StepOutcome.EXHAUSTED if self.exhausted else StepOutcome.RUNNING

        if self.goals is None:
            self._report_answer()
            self.failing = True
            return StepOutcome.ANSWER

        cell = self.goals
        self.goals = cell.next
        mark = self.bindings.mark()
        if not self._execute(cell):
            self.failing = True
        elif self.bindings.bound_since(mark):
            rewake(self)
        if settings.CHECK_INVARIANTS and blocked_violations(self.blocked, self.bindings):
            raise EngineError("blocked part holds an atom whose condition is true")
        return StepOutcome.RUNNING

    # trace

    def emit(self, port: Port, goal: Term, node: int | None = None, payload: Term | None = None) -> int:
        """Record a trace event; a new node id is allocated unless `node` is given."""
        if node is None:
            node = self.nodes
            self.nodes += 1
        if self.limits.record_trace:
            resolved = self.bindings.resolve(goal)
            self.trace.append(TraceEvent(
                port=port,
                node=node,
                goal=format_term(resolved),
                payload=None if payload is None else format_term(self.bindings.resolve(payload)),
                term=resolved,
            ))
        return node

    # selection

    def _execute(self, cell: Goal) -> bool:
        match cell.item:
            case ExitCall(frame) | ExitCatch(frame):
                self._exit(frame)
                return True
            case IteCommit(frame):
                self._truncate(frame.height)
                return True
            case NegSucceeded(frame):
                self._truncate(frame.height)
                self.bindings.undo_to(frame.mark)
                self.emit(Port.FAIL, frame.goal, frame.node)
                return False

        goal = self.bindings.deref(cell.item)
        if isinstance(goal, Var):
            raise InstantiationError("call/1")
        if isinstance(goal, Int):
            raise TypeErrorTerm("callable", goal, "call/1")
        pi = indicator(goal)
        args = goal.args if isinstance(goal, Compound) else ()
        owner = cell.owner

        match pi:
            case "true/0":
                return True
            case ",/2":
                self.goals = Goal(args[0], owner, Goal(args[1], owner, self.goals))
                return True
            case ";/2":
                condition = self.bindings.deref(args[0])
                if isinstance(condition, Compound) and indicator(condition) == "->/2":
                    self._if_then_else(condition.args[0], condition.args[1], args[1], owner)
                else:
                    self._push(DisjFrame, alternative=args[1], owner=owner)
                    self.goals = Goal(args[0], owner, self.goals)
                return True
            case "->/2":
                self._if_then_else(args[0], args[1], FAIL, owner)
                return True
            case "call/1":
                self.goals = Goal(args[0], owner, self.goals)
                return True
            case "\\+/1":
                node = self.emit(Port.CALL, goal)
                frame = self._push(NegFrame, goal=goal, node=node)
                self.goals = Goal(args[0], owner, Goal(NegSucceeded(frame), None, None))
                return True
            case "catch/3":
                node = self.emit(Port.CALL, goal)
                frame = self._push(CatchFrame, goal=goal, catcher=args[1], handler=args[2], owner=owner, node=node)
                self.goals = Goal(args[0], owner, Goal(ExitCatch(frame), None, self.goals))
                return True
            case "throw/1":
                throw_with_delays(self, args[0])
                return True
            case "backjump/1":
                self.backjump(args[0])
                return False
            case "when/2":
                select_when(self, args[0], args[1], owner)
                return True
            case "freeze/2":
                select_when(self, Compound("nonvar", (args[0],)), args[1], owner)
                return True
            case "fail/0" | "false/0":
                return self._builtin(goal, lambda: False)
            case "btid/2":
                return self._builtin(goal, partial(self._btid, args, owner))
            case "bt_target/1":
                return self._builtin(goal, partial(self._bt_target, args[0], owner))
        if pi in DETERMINISTIC:
            return self._builtin(goal, partial(DETERMINISTIC[pi], self, args))
        return self._call(goal, pi)

    def _builtin(self, goal: Term, run: Callable[[], bool]) -> bool:
        node = self.emit(Port.CALL, goal) if self.trace_builtins else None
        succeeded = run()
        if node is not None:
            self.emit(Port.EXIT if succeeded else Port.FAIL, goal, node)
        return succeeded

    def _push(self, kind: type[Frame], **fields) -> Frame:
        frame = kind(mark=self.bindings.mark(), blocked=self.blocked, cont=self.goals, height=len(self.stack), **fields)
        self.stack.append(frame)
        return frame

    def _if_then_else(self, condition: Term, then: Term, otherwise: Term, owner: CallFrame | None) -> None:
        frame = self._push(IteFrame, otherwise=otherwise, owner=owner)
        self.goals = Goal(condition, owner, Goal(IteCommit(frame), None, Goal(then, owner, self.goals)))

    # user predicates

    def _call(self, goal: Term, pi: str) -> bool:
        if self.database.defines(pi):
            clauses = list(self.database.clauses(pi))
        elif pi in self.database.dynamic:
            clauses = []
        else:
            raise UnknownProcedureError(pi)
        node = self.emit(Port.CALL, goal)
        frame = self._push(CallFrame, goal=goal, node=node, clauses=clauses)
        return self._try_clauses(frame)

    def _try_clauses(self, frame: CallFrame) -> bool:
        """Resolve with the next matching clause of the top frame, or pop it with a Fail event."""
        while frame.index < len(frame.clauses):
            clause = rename_apart(frame.clauses[frame.index], self.fresh)
            frame.index += 1
            if self.bindings.unify(frame.goal, clause.head):
                self.goals = Goal(clause.body, frame, Goal(ExitCall(frame), None, frame.cont))
                if self.bindings.bound_since(frame.mark):
                    rewake(self)
                return True
        self._pop(frame)
        self.emit(Port.FAIL, frame.goal, frame.node)
        return False

    def _exit(self, frame: CallFrame | CatchFrame) -> None:
        frame.exited = True
        frame.redone = False
        self.bindings.push_undo(partial(self._reenter, frame))
        self.emit(Port.EXIT, frame.goal, frame.node)

    def _reenter(self, frame: CallFrame | CatchFrame) -> None:
        frame.exited = False
        if frame.alive:
            frame.redone = True
            self.emit(Port.REDO, frame.goal, frame.node)

    # backtracking

    def _pop(self, frame: Frame) -> None:
        frame.alive = False
        self.stack.pop()

    def _truncate(self, height: int) -> None:
        for frame in self.stack[height:]:
            frame.alive = False
        del self.stack[height:]

    def backtrack(self) -> None:
        """Resume at the most recent frame that still offers an alternative."""
        while self.stack:
            frame = self.stack[-1]
            self.bindings.undo_to(frame.mark)
            self.blocked = frame.blocked
            match frame:
                case CallFrame():
                    if frame.alternatives and not frame.redone:
                        self.emit(Port.REDO, frame.goal, frame.node)
                    frame.redone = False
                    if self._try_clauses(frame):
                        return
                case CatchFrame():
                    self._pop(frame)
                    self.emit(Port.FAIL, frame.goal, frame.node)
                case DisjFrame():
                    self._pop(frame)
                    self.goals = Goal(frame.alternative, frame.owner, frame.cont)
                    return
                case IteFrame():
                    self._pop(frame)
                    self.goals = Goal(frame.otherwise, frame.owner, frame.cont)
                    return
                case NegFrame():
                    self._pop(frame)
                    self.emit(Port.EXIT, frame.goal, frame.node)
                    self.goals = frame.cont
                    return
        self.goals = None
        self.exhausted = True

    # exceptions and backjumping

    def throw_ball(self, ball: Term) -> None:
        """
        Unwind to the nearest catch/3 frame whose goal is still running and
        whose catcher unifies with a fresh copy of the ball.

        Frames whose goal has exited are skipped; they become candidates again
        only when backtracking re-enters their goal. The handler runs with the
        catch node's blocked part and continuation.

        Raises:
            InstantiationError: The ball is unbound
            UncaughtBallError: No frame matches
        """
        resolved = self.bindings.resolve(ball)
        if isinstance(resolved, Var):
            raise InstantiationError("throw/1")
        self.emit(Port.THROW, Compound("throw", (resolved,)), payload=resolved)
        candidates = [frame for frame in reversed(self.stack) if isinstance(frame, CatchFrame) and frame.active]
        for frame in candidates:
            self._truncate(frame.height + 1)
            self.bindings.undo_to(frame.mark)
            if self.bindings.unify(frame.catcher, copy_term(resolved, self.fresh)):
                self._truncate(frame.height)
                self.blocked = frame.blocked
                self.emit(Port.CATCH, frame.goal, frame.node, payload=resolved)
                self.goals = Goal(frame.handler, frame.owner, frame.cont)
                if self.bindings.bound_since(frame.mark):
                    rewake(self)
                return
        logger.debug("uncaught ball %s", format_term(resolved))
        raise UncaughtBallError(resolved)

    def backjump(self, target: Term) -> None:
        """
        Drop every frame above the call registered under `target`, then
        backtrack into it: its next clause is tried, or it fails when none remain.

        Raises:
            UnsupportedBuiltinError: In iso mode
            BackjumpTargetError: The target is not registered on the current stack
        """
        if self.mode is not Mode.NATIVE_BJ:
            raise UnsupportedBuiltinError("backjump/1", self.mode.value)
        key = self.bindings.resolve(target)
        if term_variables(key):
            raise InstantiationError("backjump/1")
        self.emit(Port.BACKJUMP, Compound("backjump", (key,)), payload=key)
        frame = self.registry.lookup(key)
        if frame is None or not frame.alive:
            raise BackjumpTargetError(key)
        self._truncate(frame.height + 1)

    def _register(self, key: Term, owner: CallFrame | None, context: str) -> None:
        if owner is None:
            raise BackjumpTargetError(key, f"{context} called outside a clause body")
        self.bindings.push_undo(self.registry.register(key, owner))

    def _btid(self, args: tuple[Term, ...], owner: CallFrame | None) -> bool:
        slot = self.bindings.deref(args[1])
        if not isinstance(slot, Var):
            raise TypeErrorTerm("unbound variable", slot, "btid/2")
        key = Int(self.target_ids)
        self.target_ids += 1
        self._register(key, owner, "btid/2")
        self.bindings.bind(slot, key)
        return True

    def _bt_target(self, target: Term, owner: CallFrame | None) -> bool:
        key = self.bindings.resolve(target)
        if term_variables(key):
            raise InstantiationError("bt_target/1")
        self._register(key, owner, "bt_target/1")
        return True

    # answers

    def _report_answer(self) -> None:
        bindings = {}
        for var in self.query_vars:
            value = self.bindings.resolve(var)
            if value != var:
                bindings[var.name] = value
        residue = [self.bindings.resolve(atom.as_term()) for atom in self.blocked]
        answer = Answer(bindings=bindings, residue=residue)
        self.emit(Port.ANSWER, self.query, payload=make_list(residue) if residue else None)
        self.found.append(answer)
        logger.debug("answer %d: %s", len(self.found), answer.text())


def solve(
    program: Program | str,
    query: Term | str,
    mode: Mode | str = Mode.ISO,
    limits: Limits | None = None,
) -> SolveResult:
    """
    Run `query` against `program` and collect answers and trace.

    Args:
        program: Program or its source text
        query: Goal or its source text
        mode: iso or native-bj
        limits: Step, solution and trace limits

    Returns:
        SolveResult with every answer in LD order and the full trace

    Raises:
        EngineError: With `result` holding the partial answers and trace
    """
    if isinstance(program, str):
        program = parse_program(program)
    if isinstance(query, str):
        query = parse_query(query)
    engine = Engine(program, mode, limits)
    try:
        for _ in engine.answers(query):
            pass
    except EngineError as error:
        error.result = engine.result()
        raise
    return engine.result()


BYRD_PATTERN = re.compile(r"C(E?R)*[EFK]?")
BYRD_LETTERS = {Port.CALL: "C", Port.EXIT: "E", Port.REDO: "R", Port.FAIL: "F", Port.CATCH: "K"}


def check_byrd(trace: list[TraceEvent]) -> list[str]:
    """
    Nodes whose port sequence is not `Call (Exit? Redo)* (Exit | Fail | Catch)?`.

    A Redo without a preceding Exit is a retry of a call that has not exited.

    Returns:
        One message per offending node, empty when the trace is well formed
    """
    sequences: dict[int, list[str]] = {}
    for event in trace:
        letter = BYRD_LETTERS.get(event.port)
        if letter:
            sequences.setdefault(event.node, []).append(letter)
    return [
        f"node {node}: {''.join(letters)}"
        for node, letters in sequences.items()
        if not BYRD_PATTERN.fullmatch("".join(letters))
    ]


def check_backjump(trace: list[TraceEvent]) -> list[str]:
    """Backjump events not immediately followed by a Redo or a Fail."""
    violations = []
    for position, event in enumerate(trace):
        if event.port is Port.BACKJUMP:
            following = trace[position + 1] if position + 1 < len(trace) else None
            if following is None or following.port not in (Port.REDO, Port.FAIL):
                shown = "end of trace" if following is None else following.port.value
                violations.append(f"event {position}: backjump followed by {shown}")
    return violations


def _is_catch_call(event: TraceEvent) -> bool:
    if event.term is not None:
        return isinstance(event.term, Compound) and indicator(event.term) == "catch/3"
    return event.goal.startswith("catch(") and indicator(parse_query(event.goal)) == "catch/3"


def check_catch_scope(trace: list[TraceEvent]) -> list[str]:
    """
    Catch events whose ball was thrown outside the running goal of the catching frame.

    A catch/3 node is running from its Call up to its Exit, again from each
    Redo, and stops at Fail or Catch.
    """
    catch_nodes: set[int] = set()
    running: set[int] = set()
    running_at_throw: frozenset[int] | None = None
    violations = []
    for position, event in enumerate(trace):
        match event.port:
            case Port.CALL if _is_catch_call(event):
                catch_nodes.add(event.node)
                running.add(event.node)
            case Port.REDO if event.node in catch_nodes:
                running.add(event.node)
            case Port.EXIT | Port.FAIL:
                running.discard(event.node)
            case Port.THROW:
                running_at_throw = frozenset(running)
            case Port.CATCH:
                if running_at_throw is None or event.node not in running_at_throw:
                    violations.append(f"event {position}: catch at node {event.node} outside its goal")
                running.discard(event.node)
                running_at_throw = None
    return violations
