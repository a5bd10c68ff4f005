"""Delayed goals: when/2, the blocked part and rewaking"""

from typing import TYPE_CHECKING

from app.config.settings import settings
from app.coroutine.enums import UnblockOrder
from app.coroutine.models import WhenAtom
from app.engine.enums import Port
from app.engine.errors import DomainErrorTerm, InstantiationError
from app.engine.models import CallFrame, Goal
from app.engine.schemas import TraceEvent
from app.terms.logic import Bindings
from app.terms.models import Compound, Const, Term, Var, term_variables

if TYPE_CHECKING:
    from app.engine.logic import Engine


def validate_condition(condition: Term, bindings: Bindings) -> None:
    """
    Check that a when/2 condition is built from nonvar/1, ground/1, true, ',' and ';'.

    Raises:
        InstantiationError: The condition or one of its branches is unbound
        DomainErrorTerm: Anything else
    """
    pending = [condition]
    while pending:
        current = bindings.deref(pending.pop())
        match current:
            case Var():
                raise InstantiationError("when/2 condition")
            case Const("true"):
                pass
            case Compound("nonvar" | "ground", (_,)):
                pass
            case Compound("," | ";", (left, right)):
                pending.extend((left, right))
            case _:
                raise DomainErrorTerm("when condition", bindings.resolve(condition))


def eval_condition(condition: Term, bindings: Bindings) -> bool:
    """
    Evaluate a when/2 condition under the current bindings, without side effects.

    Raises:
        InstantiationError: The condition is unbound
        DomainErrorTerm: The condition is malformed
    """
    match bindings.deref(condition):
        case Var():
            raise InstantiationError("when/2 condition")
        case Const("true"):
            return True
        case Compound("nonvar", (arg,)):
            return not isinstance(bindings.deref(arg), Var)
        case Compound("ground", (arg,)):
            return not term_variables(bindings.resolve(arg))
        case Compound(",", (left, right)):
            return eval_condition(left, bindings) and eval_condition(right, bindings)
        case Compound(";", (left, right)):
            return eval_condition(left, bindings) or eval_condition(right, bindings)
        case other:
            raise DomainErrorTerm("when condition", bindings.resolve(other))


def select_when(engine: "Engine", condition: Term, goal: Term, owner: CallFrame | None) -> None:
    """
    Run the selected `when(Condition, Goal)`.

    A satisfied condition puts the goal in front of the active part;
    otherwise the atom joins the blocked part and a Block event is emitted.
    """
    validate_condition(condition, engine.bindings)
    if eval_condition(condition, engine.bindings):
        engine.goals = Goal(goal, owner, engine.goals)
        return
    atom = WhenAtom(condition, goal, owner)
    engine.blocked = (*engine.blocked, atom)
    engine.emit(Port.BLOCK, atom.as_term())


def rewake(engine: "Engine") -> bool:
    """
    Move every blocked atom whose condition now holds to the front of the active part.

    Woken goals run before the rest of the active part, in blocked-part order
    unless settings.UNBLOCK_ORDER says otherwise. Returns True if anything woke.
    """
    if not engine.blocked:
        return False
    flags = [eval_condition(atom.condition, engine.bindings) for atom in engine.blocked]
    if not any(flags):
        return False
    woken = [atom for atom, flag in zip(engine.blocked, flags) if flag]
    engine.blocked = tuple(atom for atom, flag in zip(engine.blocked, flags) if not flag)
    if settings.UNBLOCK_ORDER is UnblockOrder.REVERSE:
        woken.reverse()
    goals = engine.goals
    for atom in reversed(woken):
        goals = Goal(atom.goal, atom.owner, goals)
    for atom in woken:
        engine.emit(Port.UNBLOCK, atom.as_term())
    engine.goals = goals
    return True


def blocked_violations(blocked: tuple[WhenAtom, ...], bindings: Bindings) -> list[WhenAtom]:
    """Blocked atoms whose condition is already true."""
    return [atom for atom in blocked if eval_condition(atom.condition, bindings)]


def pseudo_answer(trace: list[TraceEvent], node: int) -> Term | None:
    """
    Instance of the goal of `node` at the end of its last successful execution.

    Returns None when the node never exited.
    """
    for event in reversed(trace):
        if event.node == node and event.port is Port.EXIT:
            return event.term
    return None


def throw_with_delays(engine: "Engine", ball: Term) -> None:
    """
    Throw `ball` with blocked parts present.

    The enclosing-execution test looks only at whether a catch frame's goal is
    still running, never at blocked parts, and the handler continues with the
    blocked part the catch node had. Goals blocked inside the caught goal are
    dropped with it.
    """
    engine.throw_ball(ball)
