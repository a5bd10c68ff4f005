"""Terms models"""

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Var:
    """
    A logic variable.

    Identity is the (name, serial) pair; serials are unique within one
    engine run. Variables minted by renaming carry an empty name.
    """

    name: str
    serial: int


@dataclass(frozen=True, slots=True)
class Const:
    """An atom, e.g. `true` or `[]`."""

    name: str


@dataclass(frozen=True, slots=True)
class Int:
    """An unbounded integer."""

    value: int


@dataclass(frozen=True, slots=True)
class Compound:
    """A compound term f(a1, ..., an) with n >= 1."""

    functor: str
    args: tuple["Term", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError(f"compound '{self.functor}' needs at least one argument")

    @property
    def arity(self) -> int:
        return len(self.args)


Term = Var | Const | Int | Compound

NIL = Const("[]")
TRUE = Const("true")
FAIL = Const("fail")


@dataclass(frozen=True, slots=True)
class Clause:
    """
    A program clause `head :- body`.

    Facts carry the body `true`. The body is a goal tree built from
    ','/2, ';'/2 and '->'/2 compounds over callable terms.
    """

    head: Term
    body: Term = TRUE

    @property
    def indicator(self) -> str:
        return indicator(self.head)

    @property
    def is_fact(self) -> bool:
        return self.body == TRUE


class Subst(Mapping):
    """
    An idempotent substitution Var -> Term.

    Built by `unify`; never maps a variable to itself.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[Var, Term] | None = None):
        self._bindings: dict[Var, Term] = {
            var: value for var, value in (bindings or {}).items() if var != value
        }

    def __getitem__(self, var: Var) -> Term:
        return self._bindings[var]

    def __iter__(self) -> Iterator[Var]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __repr__(self) -> str:
        inner = ", ".join(f"{var.name or '_'}{var.serial}: {value!r}"
                          for var, value in self._bindings.items())
        return f"Subst({{{inner}}})"

    def by_name(self) -> dict[str, Term]:
        """Bindings keyed by variable name (unnamed variables skipped)."""
        return {var.name: value for var, value in self._bindings.items() if var.name}


def indicator(term: Term) -> str:
    """Predicate indicator `name/arity` of a callable term."""
    if isinstance(term, Compound):
        return f"{term.functor}/{len(term.args)}"
    if isinstance(term, Const):
        return f"{term.name}/0"
    raise TypeError(f"not a callable term: {term!r}")


def is_callable(term: Term) -> bool:
    return isinstance(term, (Const, Compound))


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    """Build a '.'/2 chain ending in `tail`."""
    result = tail
    for item in reversed(list(items)):
        result = Compound(".", (item, result))
    return result


def list_items(term: Term) -> tuple[list[Term], Term]:
    """Split a list term into its items and its tail (`[]` for proper lists)."""
    items = []
    while isinstance(term, Compound) and term.functor == "." and len(term.args) == 2:
        items.append(term.args[0])
        term = term.args[1]
    return items, term


def conjuncts(body: Term) -> list[Term]:
    """Flatten a right-nested ','/2 body into its goals."""
    goals = []
    while isinstance(body, Compound) and body.functor == "," and len(body.args) == 2:
        goals.append(body.args[0])
        body = body.args[1]
    goals.append(body)
    return goals


def make_conjunction(goals: Iterable[Term]) -> Term:
    """Inverse of `conjuncts`; an empty sequence gives `true`."""
    goals = list(goals)
    if not goals:
        return TRUE
    body = goals[-1]
    for goal in reversed(goals[:-1]):
        body = Compound(",", (goal, body))
    return body


def term_variables(term: Term) -> list[Var]:
    """Distinct variables of a term in depth-first, left-to-right order."""
    seen: dict[Var, None] = {}
    stack = [term]
    while stack:
        current = stack.pop()
        if isinstance(current, Var):
            seen.setdefault(current, None)
        elif isinstance(current, Compound):
            stack.extend(reversed(current.args))
    return list(seen)


def max_serial(terms: Iterable[Term]) -> int:
    """Largest variable serial occurring in `terms`, -1 when ground."""
    return max((var.serial for term in terms for var in term_variables(term)), default=-1)


CONTROL_ARGUMENTS: dict[str, tuple[int, ...]] = {
    ",/2": (0, 1),
    ";/2": (0, 1),
    "->/2": (0, 1),
    "\\+/1": (0,),
    "call/1": (0,),
    "catch/3": (0, 2),
    "when/2": (1,),
    "freeze/2": (1,),
}


def body_goals(body: Term) -> Iterator[str]:
    """Indicators of the goals called by a body, control constructs looked through."""
    stack = [body]
    while stack:
        goal = stack.pop()
        if not is_callable(goal):
            continue
        pi = indicator(goal)
        yield pi
        if pi in CONTROL_ARGUMENTS:
            stack.extend(goal.args[i] for i in reversed(CONTROL_ARGUMENTS[pi]))
