import random

import pytest

from app.config.settings import settings
from app.terms import logic as terms_logic
from app.terms.errors import TermDepthError
from app.terms.logic import (
    Bindings,
    FreshCounter,
    apply,
    binding_order,
    copy_term,
    is_variant,
    rename_apart,
    unify,
)
from app.terms.models import (
    NIL,
    TRUE,
    Subst,
    Clause,
    Compound,
    Const,
    Int,
    Var,
    body_goals,
    conjuncts,
    indicator,
    list_items,
    make_conjunction,
    make_list,
    max_serial,
    term_variables,
)

X, Y, Z = Var("X", 0), Var("Y", 1), Var("Z", 2)
a, b = Const("a"), Const("b")


def f(*args):
    return Compound("f", args)


def test_compound_needs_arguments():
    with pytest.raises(ValueError):
        Compound("f", ())


def test_indicator():
    assert indicator(f(a, b)) == "f/2"
    assert indicator(a) == "a/0"
    with pytest.raises(TypeError):
        indicator(Int(1))


def test_unify_binds_both_sides():
    s = unify(f(X, b), f(a, Y))
    assert s[X] == a and s[Y] == b


def test_unify_fails_on_clash():
    assert unify(f(a), f(b)) is None
    assert unify(f(a), Compound("f", (a, a))) is None
    assert unify(Int(1), Int(2)) is None


def test_unify_result_is_idempotent():
    s = unify(f(X, Y), f(Y, f(a)))
    assert apply(s, X) == f(a)
    assert apply(s, f(X, Y)) == f(f(a), f(a))


def test_binding_order_prefers_unnamed_then_younger():
    unnamed = Var("", 7)
    assert binding_order(X, unnamed) == (unnamed, X)
    assert binding_order(X, Y) == (Y, X)


def test_copy_term_shares_renaming():
    fresh = FreshCounter(10)
    copied = copy_term(f(X, X, Y), fresh)
    first, second, third = copied.args
    assert first == second != third
    assert first.serial >= 10 and first.name == ""


def test_rename_apart_keeps_ground_clause():
    clause = Clause(f(a), TRUE)
    assert rename_apart(clause, FreshCounter()) is clause


def test_rename_apart_shares_head_and_body_variables():
    renamed = rename_apart(Clause(f(X), Compound("g", (X,))), FreshCounter(5))
    assert renamed.head.args[0] == renamed.body.args[0]
    assert renamed.head.args[0] != X


@pytest.mark.parametrize("left, right, expected", [
    (f(X, Y), f(Y, X), True),
    (f(X, X), f(Y, Z), False),
    (f(X, Y), f(Z, Z), False),
    (f(X, a), f(Y, a), True),
    (f(X), f(a), False),
])
def test_is_variant(left, right, expected):
    assert is_variant(left, right) is expected


def test_list_helpers():
    items = [a, b]
    term = make_list(items, X)
    assert list_items(term) == (items, X)
    assert list_items(make_list([])) == ([], NIL)


def test_conjunction_helpers():
    goals = [a, b, Const("c")]
    body = make_conjunction(goals)
    assert conjuncts(body) == goals
    assert make_conjunction([]) == TRUE


def test_term_variables_and_max_serial():
    assert term_variables(f(Y, X, Y)) == [Y, X]
    assert max_serial([f(X, Z), a]) == 2
    assert max_serial([a]) == -1


def test_body_goals_looks_through_control():
    body = Compound(",", (Compound("catch", (Compound("p", (X,)), a, Compound("q", (X,)))), Compound("\\+", (Const("r"),))))
    assert set(body_goals(body)) >= {"catch/3", "p/1", "q/1", "\\+/1", "r/0"}


class TestBindings:
    def test_undo_restores_bindings_and_runs_actions(self):
        bindings = Bindings()
        undone = []
        mark = bindings.mark()
        bindings.bind(X, a)
        bindings.push_undo(lambda: undone.append("action"))
        bindings.bind(Y, b)
        assert bindings.resolve(f(X, Y)) == f(a, b)
        bindings.undo_to(mark)
        assert bindings.resolve(f(X, Y)) == f(X, Y)
        assert undone == ["action"]

    def test_failed_unify_leaves_nothing_bound(self):
        bindings = Bindings()
        assert not bindings.unify(f(X, a), f(b, b))
        assert bindings.deref(X) == X
        assert bindings.trail == []

    def test_bound_since(self):
        bindings = Bindings()
        mark = bindings.mark()
        bindings.push_undo(lambda: None)
        assert not bindings.bound_since(mark)
        assert bindings.unify(X, a)
        assert bindings.bound_since(mark)

    def test_substitution(self):
        bindings = Bindings()
        bindings.unify(f(X, Y), f(Y, a))
        assert bindings.substitution().by_name() == {"X": a, "Y": a}


class TestUnifyProperties:
    VARIABLES = tuple(Var(name, serial) for serial, name in enumerate("ABCD"))
    FRESH = (Var("U", 10), Var("W", 11))

    def test_unifier_equalizes_both_sides(self, random_term):
        rng = random.Random(settings.BJLAB_SEED)
        for _ in range(300):
            s, t = random_term(rng, 4, self.VARIABLES), random_term(rng, 4, ())
            unifier = unify(s, t)
            if unifier is not None:
                assert apply(unifier, s) == apply(unifier, t) == t

    def test_unifier_of_an_instance_is_most_general(self, random_term):
        rng = random.Random(settings.BJLAB_SEED)
        for _ in range(300):
            s = random_term(rng, 4, self.VARIABLES)
            instance = Subst({
                var: random_term(rng, 2, self.FRESH)
                for var in term_variables(s)
                if rng.random() < 0.6
            })
            t = apply(instance, s)
            unifier = unify(s, t)
            assert unifier is not None
            unified = apply(unifier, s)
            assert unified == apply(unifier, t)
            assert apply(unifier, unified) == unified
            # the instance factors through the unifier
            assert apply(instance, unified) == apply(instance, s)


class TestDeepTerms:
    LENGTH = 20_000

    def test_resolve_follows_long_binding_chains(self):
        bindings = Bindings()
        cells = [Var("", serial) for serial in range(self.LENGTH + 1)]
        for cell, following in zip(cells, cells[1:]):
            bindings.bind(cell, Compound(".", (a, following)))
        bindings.bind(cells[-1], NIL)
        items, tail = list_items(bindings.resolve(cells[0]))
        assert len(items) == self.LENGTH and tail == NIL

    def test_unify_and_apply_on_long_lists(self):
        unifier = unify(make_list([a] * self.LENGTH, X), make_list([a] * self.LENGTH + [b]))
        assert unifier is not None and unifier[X] == make_list([b])
        items, tail = list_items(apply(unifier, make_list([Y] * self.LENGTH, X)))
        assert len(items) == self.LENGTH + 1 and items[-1] == b and tail == NIL
        assert len(unify(make_list([a] * self.LENGTH), make_list([a] * self.LENGTH))) == 0

    def test_destructive_unify_on_long_lists(self):
        bindings = Bindings()
        assert bindings.unify(make_list([X] * self.LENGTH), make_list([a] * self.LENGTH))
        assert bindings.deref(X) == a
        assert not bindings.unify(make_list([Y] * self.LENGTH, a), make_list([b] * self.LENGTH, b))
        assert bindings.deref(Y) == Y

    def test_copy_term_on_deep_nesting(self):
        term = X
        for _ in range(self.LENGTH):
            term = f(term)
        copied = copy_term(term, FreshCounter(100))
        assert is_variant(copied, term)
        assert len(term_variables(copied)) == 1 and term_variables(copied) != [X]

    def test_cyclic_binding_is_reported(self, monkeypatch):
        monkeypatch.setattr(terms_logic, "MAX_TERM_DEPTH", 1000)
        bindings = Bindings()
        bindings.bind(X, f(X))
        with pytest.raises(TermDepthError):
            bindings.resolve(X)
