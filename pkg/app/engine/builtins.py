"""Deterministic builtins and arithmetic"""

from collections.abc import Callable
from typing import TYPE_CHECKING

from app.engine.errors import InstantiationError, TypeErrorTerm
from app.reader.models import RESERVED_INDICATORS
from app.terms.logic import copy_term, rename_apart
from app.terms.models import TRUE, Clause, Compound, Const, Int, Term, Var, indicator, term_variables

if TYPE_CHECKING:
    from app.engine.logic import Engine

Builtin = Callable[["Engine", tuple[Term, ...]], bool]

ARITHMETIC: dict[tuple[str, int], Callable[..., int]] = {
    ("+", 2): lambda a, b: a + b,
    ("-", 2): lambda a, b: a - b,
    ("*", 2): lambda a, b: a * b,
    ("-", 1): lambda a: -a,
    ("max", 2): max,
    ("min", 2): min,
}

COMPARISONS: dict[str, Callable[[int, int], bool]] = {
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "=<": lambda a, b: a <= b,
}


def evaluate(engine: "Engine", expression: Term, context: str = "is/2") -> int:
    """
    Evaluate an integer expression.

    Raises:
        InstantiationError: An unbound variable occurs in the expression
        TypeErrorTerm: A non-evaluable subterm occurs
    """
    expression = engine.bindings.deref(expression)
    match expression:
        case Int(value):
            return value
        case Var():
            raise InstantiationError(context)
        case Compound(functor, args) if (functor, len(args)) in ARITHMETIC:
            values = [evaluate(engine, arg, context) for arg in args]
            return ARITHMETIC[(functor, len(args))](*values)
        case Compound(functor, args):
            raise TypeErrorTerm("evaluable", Const(f"{functor}/{len(args)}"), context)
        case _:
            raise TypeErrorTerm("evaluable", expression, context)


def _unify(engine: "Engine", args: tuple[Term, ...]) -> bool:
    return engine.bindings.unify(args[0], args[1])


def _var(engine: "Engine", args: tuple[Term, ...]) -> bool:
    return isinstance(engine.bindings.deref(args[0]), Var)


def _nonvar(engine: "Engine", args: tuple[Term, ...]) -> bool:
    return not isinstance(engine.bindings.deref(args[0]), Var)


def _ground(engine: "Engine", args: tuple[Term, ...]) -> bool:
    return not term_variables(engine.bindings.resolve(args[0]))


def _is(engine: "Engine", args: tuple[Term, ...]) -> bool:
    return engine.bindings.unify(args[0], Int(evaluate(engine, args[1])))


def _comparison(name: str) -> Builtin:
    def compare(engine: "Engine", args: tuple[Term, ...]) -> bool:
        context = f"{name}/2"
        return COMPARISONS[name](evaluate(engine, args[0], context), evaluate(engine, args[1], context))

    return compare


def _clause_of(engine: "Engine", term: Term, context: str) -> Clause:
    term = engine.bindings.resolve(term)
    if isinstance(term, Compound) and term.functor == ":-" and len(term.args) == 2:
        head, body = term.args
    else:
        head, body = term, TRUE
    if isinstance(head, Var):
        raise InstantiationError(context)
    if not isinstance(head, (Const, Compound)):
        raise TypeErrorTerm("callable", head, context)
    if indicator(head) in RESERVED_INDICATORS:
        raise TypeErrorTerm("modifiable procedure", Const(indicator(head)), context)
    return Clause(head, body)


def _assertz(engine: "Engine", args: tuple[Term, ...]) -> bool:
    clause = _clause_of(engine, args[0], "assertz/1")
    mapping: dict[Var, Var] = {}
    stored = Clause(copy_term(clause.head, engine.fresh, mapping), copy_term(clause.body, engine.fresh, mapping))
    engine.database.add_clause(stored)
    return True


def _retract(engine: "Engine", args: tuple[Term, ...]) -> bool:
    pattern = _clause_of(engine, args[0], "retract/1")
    clauses = engine.database.clauses(pattern.indicator)
    for position, stored in enumerate(clauses):
        candidate = rename_apart(stored, engine.fresh)
        mark = engine.bindings.mark()
        if engine.bindings.unify(pattern.head, candidate.head) and engine.bindings.unify(pattern.body, candidate.body):
            del clauses[position]
            return True
        engine.bindings.undo_to(mark)
    return False


DETERMINISTIC: dict[str, Builtin] = {
    "=/2": _unify,
    "var/1": _var,
    "nonvar/1": _nonvar,
    "ground/1": _ground,
    "is/2": _is,
    "</2": _comparison("<"),
    ">/2": _comparison(">"),
    ">=/2": _comparison(">="),
    "=</2": _comparison("=<"),
    "assertz/1": _assertz,
    "retract/1": _retract,
}
