"""Source-to-source rewrites that add backjumping to a program"""

import logging
from collections.abc import Callable

from app.reader.formatting import format_term
from app.reader.models import Program
from app.terms.logic import FreshCounter, apply, is_variant
from app.terms.models import (
    FAIL,
    NIL,
    TRUE,
    Clause,
    Compound,
    Subst,
    Term,
    Var,
    conjuncts,
    make_conjunction,
    make_list,
    max_serial,
    term_variables,
)
from app.transform.enums import Approach, IdPolicy
from app.transform.errors import NameClashError, TransformError, UnsupportedInputError
from app.transform.schemas import BackjumpSpec

logger = logging.getLogger(__name__)


# helpers

def _fresh_above(clauses: list[Clause]) -> FreshCounter:
    return FreshCounter(1 + max_serial(term for clause in clauses for term in (clause.head, clause.body)))


def _names(*terms: Term) -> set[str]:
    return {var.name for term in terms for var in term_variables(term) if var.name}


def _new_var(base: str, taken: set[str], fresh: FreshCounter) -> Var:
    name, suffix = base, 1
    while name in taken:
        name, suffix = f"{base}{suffix}", suffix + 1
    taken.add(name)
    return fresh.var(name)


def _anonymous(fresh: FreshCounter) -> Var:
    return Var("_", fresh.take())


def btid_arguments(head: Term) -> Term:
    """Arguments handed to btid/2: the single argument itself, otherwise a list of them."""
    args = head.args if isinstance(head, Compound) else ()
    if not args:
        return NIL
    if len(args) == 1:
        return args[0]
    return make_list(args)


def _identifier(head: Term, spec: BackjumpSpec, fresh: FreshCounter, taken: set[str]) -> tuple[list[Term], Term]:
    """Goals that produce the target identifier, and the identifier itself."""
    if spec.id_policy is IdPolicy.FROM_ARG:
        args = head.args if isinstance(head, Compound) else ()
        if spec.id_arg > len(args):
            raise TransformError(f"head {format_term(head)} has no argument {spec.id_arg}")
        return [], args[spec.id_arg - 1]
    ident = _new_var("Id", taken, fresh)
    return [Compound("btid", (btid_arguments(head), ident))], ident


def _goals(body: Term) -> list[Term]:
    return [] if body == TRUE else conjuncts(body)


def _catch(goal: Term, catcher: Term, handler: Term = FAIL) -> Term:
    return Compound("catch", (goal, catcher, handler))


def rewrite_throws(body: Term, replace: Callable[[Term], Term]) -> Term:
    """Replace every throw/1 goal of a body, looking through control constructs."""
    match body:
        case Compound(",", (left, right)):
            return make_conjunction([
                *conjuncts(rewrite_throws(left, replace)),
                *conjuncts(rewrite_throws(right, replace)),
            ])
        case Compound(";" | "->" as functor, (left, right)):
            return Compound(functor, (rewrite_throws(left, replace), rewrite_throws(right, replace)))
        case Compound("\\+" | "call" as functor, (inner,)):
            return Compound(functor, (rewrite_throws(inner, replace),))
        case Compound("catch", (goal, catcher, handler)):
            return Compound("catch", (rewrite_throws(goal, replace), catcher, rewrite_throws(handler, replace)))
        case Compound("throw", (ball,)):
            return replace(ball)
    return body


def _distinct_names(clause: Clause, fresh: FreshCounter) -> Clause:
    """Rename variables that share a name with a different variable of the clause."""
    owners: dict[str, Var] = {}
    taken = _names(clause.head, clause.body)
    mapping: dict[Var, Term] = {}
    for var in term_variables(Compound(":-", (clause.head, clause.body))):
        if not var.name or var.name == "_":
            continue
        if owners.setdefault(var.name, var) != var:
            mapping[var] = _new_var(var.name, taken, fresh)
    if not mapping:
        return clause
    subst = Subst(mapping)
    return Clause(apply(subst, clause.head), apply(subst, clause.body))


def _variant_mapping(source: Term, target: Term) -> Subst:
    mapping: dict[Var, Term] = {}
    pending = [(source, target)]
    while pending:
        left, right = pending.pop()
        if isinstance(left, Var):
            mapping[left] = right
        elif isinstance(left, Compound):
            pending.extend(zip(left.args, right.args))
    return Subst(mapping)


def _merged_names(proc: list[Clause]) -> Subst:
    """
    Name each head variable of the first clause after its counterparts in the other heads.

    Ordinary names win over `_`-prefixed ones, so a variable anonymous in the
    first head but used in a later body gets a printable name.
    """
    first = proc[0]
    counterparts = [_variant_mapping(first.head, other.head) for other in proc[1:]]
    renaming: dict[Var, Term] = {}
    for var in term_variables(first.head):
        names = [var.name, *(mapping[var].name for mapping in counterparts)]
        best = next((name for name in names if name and not name.startswith("_")), None)
        best = best or next((name for name in names if name and name != "_"), var.name)
        if best != var.name:
            renaming[var] = Var(best, var.serial)
    return Subst(renaming)


# approaches

def approach1(
    proc: list[Clause],
    spec: BackjumpSpec,
    indicator: str | None = None,
    fresh: FreshCounter | None = None,
) -> list[Clause]:
    """
    Wrap each clause body so a ball carrying the clause's identifier makes the body fail.

    Every clause `p(t) :- B` becomes `p(t) :- btid(t,Id), catch(B,Id,fail)`;
    facts are wrapped with the body `true`. Exempt clauses are kept as they are,
    dynamic-exempt clauses become `(btid(t,Id) -> catch(B,Id,fail) ; B)`.

    Args:
        proc: Clauses of one procedure, in order
        spec: Identifier policy and exemptions
        indicator: Procedure indicator used in the clause keys; taken from the first head by default
        fresh: Serial source for new variables

    Returns:
        Transformed clauses in the same order

    Raises:
        TransformError: On an empty procedure or a missing identifier argument
    """
    if not proc:
        raise TransformError("cannot transform an empty procedure")
    indicator = indicator or proc[0].indicator
    fresh = fresh or _fresh_above(proc)
    transformed = []
    for index, clause in enumerate(proc, start=1):
        key = (indicator, index)
        if key in spec.exempt_clauses:
            transformed.append(clause)
            continue
        prefix, ident = _identifier(clause.head, spec, fresh, _names(clause.head, clause.body))
        wrapped = _catch(clause.body, ident)
        if key in spec.dynamic_exempt_clauses:
            body = Compound(";", (Compound("->", (prefix[0], wrapped)), clause.body))
        else:
            body = make_conjunction([*prefix, wrapped])
        transformed.append(Clause(clause.head, body))
    return transformed


def approach1a(proc: list[Clause], spec: BackjumpSpec, fresh: FreshCounter | None = None) -> Clause:
    """
    Merge a procedure whose heads are variants into one clause of nested catches.

    Failure of a body, or a ball for this call, passes control to the next body:
    `catch((B1;throw(Id)), Id, catch((B2;throw(Id)), Id, ... catch(Bn,Id,fail)))`.

    Raises:
        UnsupportedInputError: When the heads are not variants of each other
    """
    if not proc:
        raise TransformError("cannot transform an empty procedure")
    first = proc[0]
    for other in proc[1:]:
        if not is_variant(first.head, other.head):
            raise UnsupportedInputError(f"approach 1a needs clause heads equal up to renaming ({first.indicator})")
    fresh = fresh or _fresh_above(proc)
    naming = _merged_names(proc)
    head = apply(naming, first.head)
    bodies = [apply(naming, first.body)] + [apply(_variant_mapping(other.head, head), other.body) for other in proc[1:]]
    prefix, ident = _identifier(head, spec, fresh, _names(head, *bodies))
    nested = _catch(bodies[-1], ident)
    for body in reversed(bodies[:-1]):
        nested = _catch(Compound(";", (body, Compound("throw", (ident,)))), ident, nested)
    return _distinct_names(Clause(head, make_conjunction([*prefix, nested])), fresh)


def approach2(clause: Clause, split: int, spec: BackjumpSpec, fresh: FreshCounter | None = None) -> Clause:
    """
    Split `H :- B0, B1` after `split` goals into `H :- B0, btid(t,Id), catch(B1,Id,fail)`.

    Raises:
        TransformError: When B0 or B1 would be empty
    """
    goals = conjuncts(clause.body)
    if not 1 <= split < len(goals):
        raise TransformError(f"split {split} out of range for a body of {len(goals)} goals in {clause.indicator}")
    fresh = fresh or _fresh_above([clause])
    prefix, ident = _identifier(clause.head, spec, fresh, _names(clause.head, clause.body))
    body = make_conjunction([*goals[:split], *prefix, _catch(make_conjunction(goals[split:]), ident)])
    return Clause(clause.head, body)


def catch_procedure(fresh: FreshCounter) -> Clause:
    """`catch(Id) :- (target(_) -> retract(target(Id)) ; true).`"""
    ident = fresh.var("Id")
    target_any = Compound("target", (_anonymous(fresh),))
    retract = Compound("retract", (Compound("target", (ident,)),))
    return Clause(Compound("catch", (ident,)), Compound(";", (Compound("->", (target_any, retract)), TRUE)))


def dbsim(program: Program, spec: BackjumpSpec) -> Program:
    """
    Simulate backjumping with a `target/1` database fact.

    Target clauses become `p(t) :- btid(t,Id), catch(Id), B`, exempt ones
    `p(t) :- \\+ target(_), B`; every `throw(T)` becomes
    `assertz(target(T)), fail`, and the catch/1 procedure is appended.

    Raises:
        NameClashError: When catch/1 or target/1 already exists
        UnsupportedInputError: For dynamic-exempt clauses
    """
    for introduced in ("catch/1", "target/1"):
        if program.defines(introduced) or introduced in program.dynamic:
            raise NameClashError(introduced)
    if spec.dynamic_exempt_clauses:
        raise UnsupportedInputError("dynamic-exempt clauses apply to approach 1 only")
    fresh = FreshCounter(1 + program.max_serial())
    result = Program(dynamic=set(program.dynamic) | {"target/1"})
    for indicator, clauses in program.procedures.items():
        for index, clause in enumerate(clauses, start=1):
            body = rewrite_throws(
                clause.body,
                lambda ball: make_conjunction([Compound("assertz", (Compound("target", (ball,)),)), FAIL]),
            )
            if spec.targets(indicator):
                if (indicator, index) in spec.exempt_clauses:
                    guard = Compound("\\+", (Compound("target", (_anonymous(fresh),)),))
                    body = make_conjunction([guard, *_goals(body)])
                else:
                    prefix, ident = _identifier(clause.head, spec, fresh, _names(clause.head, clause.body))
                    body = make_conjunction([*prefix, Compound("catch", (ident,)), *_goals(body)])
            result.add_clause(Clause(clause.head, body))
    result.add_clause(catch_procedure(fresh))
    return result


def annotate_native(program: Program, spec: BackjumpSpec) -> Program:
    """
    Native-backjump counterpart of approach 1.

    Non-exempt clauses of the target procedures register their call as a
    target (`btid/2`, or `bt_target/1` on the identifying argument) and every
    `throw/1` becomes `backjump/1`.
    """
    fresh = FreshCounter(1 + program.max_serial())
    result = Program(dynamic=set(program.dynamic))
    for indicator, clauses in program.procedures.items():
        for index, clause in enumerate(clauses, start=1):
            body = rewrite_throws(clause.body, lambda ball: Compound("backjump", (ball,)))
            if spec.targets(indicator) and (indicator, index) not in spec.exempt_clauses:
                prefix, ident = _identifier(clause.head, spec, fresh, _names(clause.head, clause.body))
                registration = prefix or [Compound("bt_target", (ident,))]
                body = make_conjunction([*registration, *_goals(body)])
            result.add_clause(Clause(clause.head, body))
    return result


def transform_program(program: Program, approach: Approach | str, spec: BackjumpSpec) -> Program:
    """
    Apply one approach to the target procedures of a program.

    Approach 1a merges the non-exempt clauses of each target procedure into one
    clause placed where the first of them stood; approach 2 rewrites exactly the
    clauses named in `spec.split_points`.

    Raises:
        TransformError: On designations that do not exist or an unusable spec
    """
    approach = Approach(approach)
    if approach is Approach.DBSIM:
        return dbsim(program, spec)

    for indicator, _ in (*spec.exempt_clauses, *spec.dynamic_exempt_clauses, *spec.split_points):
        if not program.defines(indicator):
            raise TransformError(f"no procedure {indicator}")
    fresh = FreshCounter(1 + program.max_serial())
    result = Program(dynamic=set(program.dynamic))
    for indicator, clauses in program.procedures.items():
        match approach:
            case Approach.APPROACH_1 if spec.targets(indicator):
                clauses = approach1(clauses, spec, indicator, fresh)
            case Approach.APPROACH_1A if spec.targets(indicator):
                clauses = _merge_procedure(clauses, spec, indicator, fresh)
            case Approach.APPROACH_2:
                clauses = _split_procedure(clauses, spec, indicator, fresh)
        for clause in clauses:
            result.add_clause(clause)
    logger.info("applied approach %s to %d procedures", approach.value, len(result.procedures))
    return result


def _merge_procedure(clauses: list[Clause], spec: BackjumpSpec, indicator: str, fresh: FreshCounter) -> list[Clause]:
    if spec.dynamic_exempt_clauses:
        raise UnsupportedInputError("dynamic-exempt clauses apply to approach 1 only")
    merged = [index for index in range(1, len(clauses) + 1) if (indicator, index) not in spec.exempt_clauses]
    if not merged:
        return clauses
    clause = approach1a([clauses[index - 1] for index in merged], spec, fresh)
    output = []
    for index, original in enumerate(clauses, start=1):
        if index == merged[0]:
            output.append(clause)
        elif index not in merged:
            output.append(original)
    return output


def _split_procedure(clauses: list[Clause], spec: BackjumpSpec, indicator: str, fresh: FreshCounter) -> list[Clause]:
    output = list(clauses)
    for (split_indicator, index), split in spec.split_points.items():
        if split_indicator != indicator:
            continue
        if index > len(clauses):
            raise TransformError(f"{indicator} has no clause {index}")
        output[index - 1] = approach2(clauses[index - 1], split, spec, fresh)
    return output


def uses_backjump(program: Program) -> bool:
    return program.uses("backjump/1")

