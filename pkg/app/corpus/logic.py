"""SAT encodings, the brute-force oracle and trace comparison"""

import itertools
import logging
import random
import re
from collections.abc import Iterable
from pathlib import Path

from app.config.settings import settings
from app.corpus.enums import EncodingStyle
from app.corpus.errors import CorpusError
from app.corpus.schemas import AnswerRecord, Assignment, Cnf, Divergence, Verdict
from app.engine.enums import Mode, Port
from app.engine.logic import solve
from app.engine.schemas import Answer, Limits, SolveResult, TraceEvent
from app.reader.formatting import format_term
from app.reader.errors import PrologSyntaxError
from app.reader.logic import parse_query
from app.reader.models import Program
from app.terms.logic import FreshCounter, apply
from app.terms.models import NIL, Compound, Const, Int, Subst, Term, conjuncts, indicator, list_items, make_list, term_variables

logger = logging.getLogger(__name__)

MAX_ORACLE_VARIABLES = 20

KEPT_PORTS = frozenset({Port.CALL, Port.EXIT, Port.REDO, Port.FAIL, Port.ANSWER})

BOOKKEEPING = frozenset({
    "btid/2",
    "bt_target/1",
    "backjump/1",
    "catch/3",
    "throw/1",
    "catch/1",
    "target/1",
    "\\+/1",
    "assertz/1",
    "retract/1",
})

GENERATED_VARIABLE = re.compile(r"_G\d+")


# encoding

def variable_name(variable: str) -> str:
    """Engine variable name standing for a CNF variable."""
    return variable[:1].upper() + variable[1:]


def encode(cnf: Cnf, style: EncodingStyle | str = EncodingStyle.PLAIN) -> Term:
    """
    Encode a formula as a list of clauses, each a list of `true-V`/`false-V` pairs.

    Both styles give the same term; the leveled programs bind each V to a
    `(Level,Value)` pair instead of a truth value.
    """
    EncodingStyle(style)
    fresh = FreshCounter()
    variables = {variable: fresh.var(variable_name(variable)) for variable in cnf.variables}
    return make_list(
        make_list(Compound("-", (Const("true" if polarity else "false"), variables[variable])) for polarity, variable in clause)
        for clause in cnf.clauses
    )


def query_for(goal: str, cnf: Cnf, style: EncodingStyle | str = EncodingStyle.PLAIN) -> Term:
    """Parse `goal` and bind its variable F to the encoded formula."""
    query = parse_query(goal)
    formula = [var for var in term_variables(query) if var.name == "F"]
    if not formula:
        raise CorpusError(f"query {goal!r} has no variable F for the formula")
    return apply(Subst({formula[0]: encode(cnf, style)}), query)


def solve_cnf(
    program: Program,
    goal: str,
    cnf: Cnf,
    mode: Mode | str = Mode.ISO,
    limits: Limits | None = None,
) -> SolveResult:
    """Run a corpus program on an encoded formula."""
    return solve(program, query_for(goal, cnf), mode, limits)


# oracle

def oracle(cnf: Cnf) -> set[Assignment]:
    """
    Every satisfying total assignment, by truth table.

    Raises:
        CorpusError: Over more than 20 variables
    """
    if len(cnf.variables) > MAX_ORACLE_VARIABLES:
        raise CorpusError(f"oracle limited to {MAX_ORACLE_VARIABLES} variables, got {len(cnf.variables)}")
    models = set()
    for values in itertools.product((False, True), repeat=len(cnf.variables)):
        if cnf.satisfied_by(dict(zip(cnf.variables, values))):
            models.add(values)
    return models


def _truth_value(value: Term, style: EncodingStyle) -> bool | None:
    if style is EncodingStyle.LEVELED:
        match value:
            case Compound(",", (Int(), Const("true" | "false") as truth)):
                return truth.name == "true"
        return None
    match value:
        case Const("true" | "false") as truth:
            return truth.name == "true"
    return None


def project_answer(answer: Answer, cnf: Cnf, style: EncodingStyle | str = EncodingStyle.PLAIN) -> AnswerRecord:
    """
    Read the truth value of every CNF variable off an answer.

    Levels of `(Level,Value)` pairs are dropped; unbound variables stay out
    of the assignment.
    """
    style = EncodingStyle(style)
    assignment = {}
    for variable in cnf.variables:
        value = answer.bindings.get(variable_name(variable))
        truth = None if value is None else _truth_value(value, style)
        if truth is not None:
            assignment[variable] = truth
    return AnswerRecord(
        bindings={name: format_term(value, 699) for name, value in answer.bindings.items()},
        assignment=assignment,
    )


def answers_cover_oracle(
    answers: Iterable[Answer | AnswerRecord],
    cnf: Cnf,
    style: EncodingStyle | str = EncodingStyle.PLAIN,
) -> Verdict:
    """
    Compare answers with the oracle.

    Sound when every instance of every answer satisfies the formula; complete
    when every satisfying assignment is an instance of some answer.
    """
    records = [item if isinstance(item, AnswerRecord) else project_answer(item, cnf, style) for item in answers]
    unsound = [
        values
        for record in records
        for values in record.instances(cnf.variables)
        if not cnf.satisfied_by(values)
    ]
    missing = []
    for model in sorted(oracle(cnf)):
        values = dict(zip(cnf.variables, model))
        if not any(record.covers(values) for record in records):
            missing.append(values)
    return Verdict(sound=not unsound, complete=not missing, unsound=unsound, missing=missing)


# formulas

def random_cnfs(seed: int | None = None, count: int | None = None) -> list[Cnf]:
    """
    Reproducible random formulas: 1 to 4 variables, 1 to 5 clauses of 1 to 3 literals.

    Args:
        seed: Defaults to settings.BJLAB_SEED
        count: Defaults to settings.CORPUS_SIZE
    """
    rng = random.Random(settings.BJLAB_SEED if seed is None else seed)
    formulas = []
    for _ in range(settings.CORPUS_SIZE if count is None else count):
        variables = tuple(f"x{index}" for index in range(1, rng.randint(1, 4) + 1))
        clauses = tuple(
            tuple((rng.random() < 0.5, rng.choice(variables)) for _ in range(rng.randint(1, 3)))
            for _ in range(rng.randint(1, 5))
        )
        formulas.append(Cnf(variables=variables, clauses=clauses))
    return formulas


def exhaustive_cnfs(n_vars: int, max_clauses: int = 2) -> list[Cnf]:
    """Every formula of at most `max_clauses` distinct nonempty clauses over `n_vars` variables."""
    variables = tuple(f"x{index}" for index in range(1, n_vars + 1))
    literals = [(polarity, variable) for variable in variables for polarity in (True, False)]
    clauses = [
        combination
        for width in range(1, len(literals) + 1)
        for combination in itertools.combinations(literals, width)
    ]
    return [
        Cnf(variables=variables, clauses=chosen)
        for size in range(max_clauses + 1)
        for chosen in itertools.combinations(clauses, size)
    ]


def parse_dimacs(text: str) -> Cnf:
    """
    Read `p cnf N M` followed by clauses of signed integers, each ended by 0.

    Variable i becomes `x<i>`; lines starting with `c` are comments.

    Raises:
        CorpusError: On a missing or malformed header, bad literals or a clause count mismatch
    """
    header = None
    numbers: list[int] = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            fields = line.split()
            if header is not None or len(fields) != 4 or fields[1] != "cnf":
                raise CorpusError(f"line {number}: bad header {line!r}")
            try:
                header = (int(fields[2]), int(fields[3]))
            except ValueError as error:
                raise CorpusError(f"line {number}: bad header {line!r}") from error
            continue
        if header is None:
            raise CorpusError(f"line {number}: clause before the header")
        try:
            numbers.extend(int(field) for field in line.split())
        except ValueError as error:
            raise CorpusError(f"line {number}: bad literal in {line!r}") from error
    if header is None:
        raise CorpusError("missing 'p cnf' header")
    n_vars, n_clauses = header
    if numbers and numbers[-1] != 0:
        raise CorpusError("last clause is not terminated by 0")

    clauses, current = [], []
    for literal in numbers:
        if literal == 0:
            clauses.append(tuple(current))
            current = []
        elif abs(literal) > n_vars:
            raise CorpusError(f"literal {literal} beyond {n_vars} variables")
        else:
            current.append((literal > 0, f"x{abs(literal)}"))
    if len(clauses) != n_clauses:
        raise CorpusError(f"header announces {n_clauses} clauses, found {len(clauses)}")
    return Cnf(variables=tuple(f"x{index}" for index in range(1, n_vars + 1)), clauses=tuple(clauses))


def format_dimacs(cnf: Cnf) -> str:
    positions = {variable: index for index, variable in enumerate(cnf.variables, start=1)}
    lines = [f"p cnf {len(cnf.variables)} {len(cnf.clauses)}"]
    for clause in cnf.clauses:
        literals = [str(positions[variable] if polarity else -positions[variable]) for polarity, variable in clause]
        lines.append(" ".join([*literals, "0"]))
    return "\n".join(lines) + "\n"


# traces

def event_term(event: TraceEvent) -> Term | None:
    """The goal of an event as a term, parsed from its text when read back from a file."""
    if event.term is not None:
        return event.term
    try:
        return parse_query(event.goal)
    except PrologSyntaxError:
        logger.debug("unparseable trace goal %r", event.goal)
        return None


def event_indicator(event: TraceEvent) -> str | None:
    term = event_term(event)
    if isinstance(term, (Const, Compound)):
        return indicator(term)
    return None


def project_trace(trace: list[TraceEvent], keep: Iterable[str] | None = None) -> list[TraceEvent]:
    """
    Keep the Call, Exit, Redo, Fail and Answer events of the chosen predicates.

    Without `keep`, every predicate except the backjumping bookkeeping ones is
    kept. Answer events are always kept. Node ids are renumbered by first
    appearance and generated variable names `_G<n>` by first occurrence, so
    runs of differently transformed programs compare equal.
    """
    keep = None if keep is None else set(keep)
    nodes: dict[int, int] = {}
    names: dict[str, str] = {}

    def rename(text: str | None) -> str | None:
        if text is None:
            return None
        return GENERATED_VARIABLE.sub(lambda match: names.setdefault(match.group(), f"_G{len(names)}"), text)

    projected = []
    for event in trace:
        if event.port not in KEPT_PORTS:
            continue
        if event.port is not Port.ANSWER:
            pi = event_indicator(event)
            if pi is None or (pi in BOOKKEEPING if keep is None else pi not in keep):
                continue
        node = nodes.setdefault(event.node, len(nodes))
        projected.append(TraceEvent(
            port=event.port,
            node=node,
            goal=rename(event.goal),
            payload=rename(event.payload),
            term=event.term,
        ))
    return projected


def _comparable(event: TraceEvent) -> tuple:
    return event.port.value, event.node, event.goal, event.payload or ""


def diff_traces(
    a: list[TraceEvent],
    b: list[TraceEvent],
    keep: Iterable[str] | None = None,
    project: bool = False,
) -> Divergence | None:
    """
    Find the first event where two traces differ.

    Args:
        a: First trace
        b: Second trace
        keep: Predicates to project onto; implies `project`
        project: Project both traces before comparing

    Returns:
        The first divergence, or None when the traces are equal
    """
    if keep is not None or project:
        a, b = project_trace(a, keep), project_trace(b, keep)
    for index, (left, right) in enumerate(zip(a, b)):
        if _comparable(left) != _comparable(right):
            return Divergence(index=index, left=left, right=right)
    if len(a) != len(b):
        index = min(len(a), len(b))
        return Divergence(
            index=index,
            left=a[index] if index < len(a) else None,
            right=b[index] if index < len(b) else None,
        )
    return None


def load_trace(path: str | Path) -> list[TraceEvent]:
    """
    Read a JSON-lines trace file.

    Raises:
        CorpusError: On a line that is not a trace event
    """
    events = []
    for number, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            events.append(TraceEvent.model_validate_json(line))
        except ValueError as error:
            raise CorpusError(f"{path}:{number}: not a trace event") from error
    return events


def dump_trace(trace: list[TraceEvent], path: str | Path) -> None:
    Path(path).write_text("".join(event.to_json() + "\n" for event in trace))


# level invariants of the leveled programs

def _levels(term: Term) -> list[int]:
    """Levels of the `(Level,Value)` pairs occurring in a term."""
    match term:
        case Compound(",", (Int(level), Const())):
            return [level]
        case Compound(_, args):
            return [level for arg in args for level in _levels(arg)]
    return []


def _current_clause(indicator_text: str, first: Term) -> Term:
    if indicator_text == "sat_b/3":
        items, _ = list_items(first)
        return items[0] if items else NIL
    return first


def _leveled_calls(trace: list[TraceEvent], indicator_text: str):
    for position, event in enumerate(trace):
        if event.port is not Port.CALL:
            continue
        term = event_term(event)
        if isinstance(term, Compound) and indicator(term) == indicator_text:
            first, level, highest = term.args
            if isinstance(level, Int) and isinstance(highest, Int):
                yield position, first, level.value, highest.value


def level_invariant_violations(trace: list[TraceEvent], indicator_text: str) -> list[str]:
    """
    Calls of a leveled predicate (`sat_cl/3` or `sat_b/3`) breaking the level invariant.

    At every Call the level exceeds the highest level argument and every level
    already recorded in the formula argument.
    """
    violations = []
    for position, first, level, highest in _leveled_calls(trace, indicator_text):
        recorded = _levels(first)
        if level <= highest or any(level <= other for other in recorded):
            violations.append(f"event {position}: {trace[position].goal}")
    return violations


def throw_level_violations(trace: list[TraceEvent], indicator_text: str) -> list[str]:
    """
    Throws of a leveled predicate that do not carry the highest relevant level.

    The ball must equal the highest level argument of the throwing call, be
    non-negative and lie below the thrower's level, and equal the maximum of
    the parent call's highest level and the levels in its current clause.
    """
    step = 1 if indicator_text == "sat_b/3" else 0
    calls = list(_leveled_calls(trace, indicator_text))
    violations = []
    for position, event in enumerate(trace):
        if event.port is not Port.THROW:
            continue
        earlier = [call for call in calls if call[0] < position]
        if not earlier:
            continue
        start, first, level, highest = earlier[-1]
        thrower = trace[start].node
        finished = any(other.node == thrower and other.port is Port.FAIL for other in trace[start:position])
        if finished or _current_clause(indicator_text, first) != NIL:
            continue
        ball = event_term(event)
        ball = ball.args[0] if isinstance(ball, Compound) else None
        if ball != Int(highest) or not 0 <= highest < level:
            violations.append(f"event {position}: ball {event.payload} thrown at level {level}")
            continue
        parents = [call for call in earlier[:-1] if call[2] == level - step]
        if parents:
            _, parent_first, _, parent_highest = parents[-1]
            expected = max([parent_highest, *_levels(_current_clause(indicator_text, parent_first))])
            if expected != highest:
                violations.append(f"event {position}: ball {highest}, highest recorded level {expected}")
    return violations


EXEMPT_FIRST_GOALS = frozenset({"nonvar/1", "is/2"})


def exemption_counterexamples(trace: list[TraceEvent]) -> list[str]:
    """
    Catch events performed by a frame wrapping a nonvar-clause or skip-literal body.

    Those bodies start with nonvar/1 or is/2; a catch there would mean a ball
    carrying the node's level came from one of its own descendants.
    """
    found = []
    for position, event in enumerate(trace):
        if event.port is not Port.CATCH:
            continue
        term = event_term(event)
        if not (isinstance(term, Compound) and indicator(term) == "catch/3"):
            continue
        goal = term.args[0]
        if isinstance(goal, Compound) and goal.functor == ";" and len(goal.args) == 2:
            goal = goal.args[0]
        first = conjuncts(goal)[0]
        if isinstance(first, (Const, Compound)) and indicator(first) in EXEMPT_FIRST_GOALS:
            found.append(f"event {position}: {event.goal}")
    return found
