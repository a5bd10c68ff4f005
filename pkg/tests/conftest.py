"""Shared fixtures"""

import random
from collections.abc import Callable, Sequence

import pytest

from app.engine.enums import Mode
from app.engine.logic import solve
from app.engine.schemas import Limits, SolveResult
from app.reader.logic import parse_program
from app.terms.models import NIL, Compound, Const, Int, Term, Var, make_list
from app.transform.programs import build_corpus_programs

RANDOM_FUNCTORS = (("f", 1), ("g", 2), ("h", 3), ("+", 2), ("*", 2), ("=", 2))
RANDOM_ATOMS = ("a", "b", "[]")


@pytest.fixture(scope="session")
def corpus_programs():
    return build_corpus_programs()


@pytest.fixture
def run() -> Callable[..., SolveResult]:
    """Solve a query against program text; keyword arguments become Limits."""

    def _run(source: str, query: str, mode: Mode | str = Mode.ISO, **limits) -> SolveResult:
        return solve(parse_program(source), query, mode, Limits(**limits))

    return _run


@pytest.fixture
def answer_texts() -> Callable[[SolveResult], list[str]]:
    return lambda result: [answer.text() for answer in result.answers]


@pytest.fixture
def events() -> Callable[..., list[tuple[str, int, str]]]:
    """(port, node, goal) triples of a trace, optionally limited to some ports."""

    def _events(result: SolveResult, *ports: str) -> list[tuple[str, int, str]]:
        return [
            (event.port.value, event.node, event.goal)
            for event in result.trace
            if not ports or event.port.value in ports
        ]

    return _events


@pytest.fixture
def random_term() -> Callable[[random.Random, int, Sequence[Var]], Term]:
    """Random terms over a few functors, operators, atoms, small integers, lists and the given variables."""

    def _random_term(rng: random.Random, depth: int, variables: Sequence[Var]) -> Term:
        roll = rng.random()
        if depth == 0 or roll < 0.3:
            kind = rng.randrange(3)
            if kind == 0 and variables:
                return rng.choice(variables)
            if kind == 1:
                return Int(rng.randrange(10))
            return Const(rng.choice(RANDOM_ATOMS))
        if roll < 0.45:
            items = [_random_term(rng, depth - 1, variables) for _ in range(rng.randrange(1, 4))]
            tail = rng.choice(variables) if variables and rng.random() < 0.3 else NIL
            return make_list(items, tail)
        name, arity = rng.choice(RANDOM_FUNCTORS)
        return Compound(name, tuple(_random_term(rng, depth - 1, variables) for _ in range(arity)))

    return _random_term
