"""Unification, substitution and renaming"""

from collections.abc import Callable

from app.terms.errors import TermDepthError
from app.terms.models import Clause, Compound, Subst, Term, Var

# Pending subterms allowed during one traversal; a cyclic term reaches it
MAX_TERM_DEPTH = 1_000_000


class FreshCounter:
    """Source of variable serials, monotone within one run."""

    def __init__(self, start: int = 0):
        self.value = start

    def take(self) -> int:
        serial = self.value
        self.value += 1
        return serial

    def var(self, name: str = "") -> Var:
        return Var(name, self.take())


def binding_order(a: Var, b: Var) -> tuple[Var, Var]:
    """
    Decide which of two unbound variables gets bound to the other.

    Unnamed variables are bound before named ones so answers mention the
    query's own names; otherwise the younger (higher serial) variable is bound.

    Returns:
        (variable to bind, variable it is bound to)
    """
    if bool(a.name) != bool(b.name):
        return (b, a) if a.name else (a, b)
    return (a, b) if a.serial >= b.serial else (b, a)


def _walk(term: Term, bindings: dict[Var, Term]) -> Term:
    while isinstance(term, Var) and term in bindings:
        term = bindings[term]
    return term


def _same_leaf(left: Term, right: Term) -> bool:
    """Identity, or equality of two non-compound terms; compounds are compared by decomposition."""
    return left is right or (not isinstance(left, Compound) and left == right)


def rebuild(term: Term, visit: Callable[[Term], Term]) -> Term:
    """
    Rebuild `term` bottom-up on an explicit stack.

    Every subterm is first passed through `visit`; compounds coming out of it
    are descended into, anything else is kept as returned. A compound whose
    arguments all come back identical is reused.

    Raises:
        TermDepthError: More than MAX_TERM_DEPTH subterms are pending at once
    """
    done: list[Term] = []
    stack: list[tuple[Term, bool]] = [(term, False)]
    while stack:
        current, expanded = stack.pop()
        if expanded:
            count = len(current.args)
            args = tuple(done[-count:])
            del done[-count:]
            if any(new is not old for new, old in zip(args, current.args)):
                current = Compound(current.functor, args)
            done.append(current)
            continue
        current = visit(current)
        if isinstance(current, Compound):
            stack.append((current, True))
            stack.extend((arg, False) for arg in reversed(current.args))
            if len(stack) > MAX_TERM_DEPTH:
                raise TermDepthError(MAX_TERM_DEPTH)
        else:
            done.append(current)
    return done[0]


def _substitute(term: Term, bindings: dict[Var, Term]) -> Term:
    return rebuild(term, lambda current: _walk(current, bindings))


def unify(a: Term, b: Term, s: Subst | None = None) -> Subst | None:
    """
    Most general unifier of `a` and `b` extending `s`.

    No occurs check is made.

    Args:
        a: Left term
        b: Right term
        s: Substitution to extend; empty when omitted

    Returns:
        An idempotent substitution, or None when the terms do not unify
    """
    work: dict[Var, Term] = dict(s or {})
    pending = [(a, b)]
    while pending:
        left, right = pending.pop()
        left, right = _walk(left, work), _walk(right, work)
        if _same_leaf(left, right):
            continue
        if isinstance(left, Var) and isinstance(right, Var):
            var, value = binding_order(left, right)
            work[var] = value
        elif isinstance(left, Var):
            work[left] = right
        elif isinstance(right, Var):
            work[right] = left
        elif (
            isinstance(left, Compound)
            and isinstance(right, Compound)
            and left.functor == right.functor
            and len(left.args) == len(right.args)
        ):
            pending.extend(zip(reversed(left.args), reversed(right.args)))
        else:
            return None
    return Subst({var: _substitute(value, work) for var, value in work.items()})


def apply(s: Subst, t: Term) -> Term:
    """Replace every variable bound in `s` throughout `t`."""
    if not s:
        return t
    return _substitute(t, dict(s))


def copy_term(term: Term, fresh: FreshCounter, mapping: dict[Var, Var] | None = None) -> Term:
    """Copy `term` with each distinct variable replaced by a fresh unnamed one."""
    mapping = {} if mapping is None else mapping

    def copy(current: Term) -> Term:
        if isinstance(current, Var):
            if current not in mapping:
                mapping[current] = fresh.var()
            return mapping[current]
        return current

    return rebuild(term, copy)


def rename_apart(clause: Clause, fresh: FreshCounter) -> Clause:
    """
    Rename every variable of a clause to a fresh serial.

    Head and body share one renaming; a ground clause is returned as is.
    """
    mapping: dict[Var, Var] = {}
    head = copy_term(clause.head, fresh, mapping)
    body = copy_term(clause.body, fresh, mapping)
    if not mapping:
        return clause
    return Clause(head, body)


def is_variant(a: Term, b: Term) -> bool:
    """True when `a` and `b` are equal up to a bijective variable renaming."""
    forward: dict[Var, Var] = {}
    backward: dict[Var, Var] = {}
    pending = [(a, b)]
    while pending:
        left, right = pending.pop()
        if isinstance(left, Var) and isinstance(right, Var):
            if forward.setdefault(left, right) != right or backward.setdefault(right, left) != left:
                return False
        elif isinstance(left, Compound) and isinstance(right, Compound):
            if left.functor != right.functor or len(left.args) != len(right.args):
                return False
            pending.extend(zip(left.args, right.args))
        elif left != right or isinstance(left, Var) or isinstance(right, Var):
            return False
    return True


class Bindings:
    """
    Mutable binding store with a trail.

    The trail holds bound variables and undo actions; `undo_to(mark)`
    unwinds both in reverse order, which is how the engine restores the
    state of a choice point.
    """

    def __init__(self):
        self.store: dict[Var, Term] = {}
        self.trail: list[Var | Callable[[], None]] = []

    def mark(self) -> int:
        return len(self.trail)

    def deref(self, term: Term) -> Term:
        return _walk(term, self.store)

    def resolve(self, term: Term) -> Term:
        """Fully instantiate `term` under the current bindings."""
        return _substitute(term, self.store)

    def bind(self, var: Var, value: Term) -> None:
        self.store[var] = value
        self.trail.append(var)

    def push_undo(self, action: Callable[[], None]) -> None:
        """Record an action to run when backtracking passes this point."""
        self.trail.append(action)

    def undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            entry = self.trail.pop()
            if isinstance(entry, Var):
                del self.store[entry]
            else:
                entry()

    def bound_since(self, mark: int) -> bool:
        """True when a variable was bound after `mark`."""
        return any(isinstance(entry, Var) for entry in self.trail[mark:])

    def unify(self, a: Term, b: Term) -> bool:
        """Destructive unification; on failure nothing stays bound."""
        start = self.mark()
        pending = [(a, b)]
        while pending:
            left, right = pending.pop()
            left, right = self.deref(left), self.deref(right)
            if _same_leaf(left, right):
                continue
            if isinstance(left, Var) and isinstance(right, Var):
                self.bind(*binding_order(left, right))
            elif isinstance(left, Var):
                self.bind(left, right)
            elif isinstance(right, Var):
                self.bind(right, left)
            elif (
                isinstance(left, Compound)
                and isinstance(right, Compound)
                and left.functor == right.functor
                and len(left.args) == len(right.args)
            ):
                pending.extend(zip(reversed(left.args), reversed(right.args)))
            else:
                self._unbind_to(start)
                return False
        return True

    def _unbind_to(self, mark: int) -> None:
        # only variables were pushed since `mark`
        while len(self.trail) > mark:
            del self.store[self.trail.pop()]

    def substitution(self) -> Subst:
        return Subst({var: self.resolve(var) for var in self.store})
