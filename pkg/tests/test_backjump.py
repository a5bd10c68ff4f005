import pytest

from app.engine.enums import Mode
from app.engine.errors import BackjumpTargetError
from app.engine.logic import check_backjump, check_byrd

CHOICE_POINTS = """
top(X) :- choice(X), body(X).
choice(1) :- bt_target(c).
choice(2) :- bt_target(c).
choice(3) :- bt_target(c).
body(1) :- backjump(c).
body(3).
"""

LAST_CHILD = """
top(X, Y) :- outer(X), choice(Y), body(X, Y).
outer(1).
outer(2).
choice(1) :- bt_target(c).
choice(2) :- bt_target(c).
body(2, 2).
body(1, 2) :- backjump(c).
"""

RUNNING_TARGET = """
choice(X) :- bt_target(c), X = 1, body(X).
choice(2).
body(1) :- backjump(c).
"""


def test_backjump_retries_the_target(run, events):
    result = run(CHOICE_POINTS, "top(X)", Mode.NATIVE_BJ)
    assert [answer.text() for answer in result.answers] == ["X=3"]
    assert events(result) == [
        ("Call", 0, "top(X)"),
        ("Call", 1, "choice(X)"),
        ("Call", 2, "bt_target(c)"),
        ("Exit", 2, "bt_target(c)"),
        ("Exit", 1, "choice(1)"),
        ("Call", 3, "body(1)"),
        ("Backjump", 4, "backjump(c)"),
        ("Redo", 1, "choice(1)"),
        ("Call", 5, "bt_target(c)"),
        ("Exit", 5, "bt_target(c)"),
        ("Exit", 1, "choice(2)"),
        ("Call", 6, "body(2)"),
        ("Fail", 6, "body(2)"),
        ("Redo", 1, "choice(2)"),
        ("Call", 7, "bt_target(c)"),
        ("Exit", 7, "bt_target(c)"),
        ("Exit", 1, "choice(3)"),
        ("Call", 8, "body(3)"),
        ("Exit", 8, "body(3)"),
        ("Exit", 0, "top(3)"),
        ("Answer", 9, "top(3)"),
        ("Redo", 0, "top(3)"),
        ("Redo", 8, "body(3)"),
        ("Fail", 8, "body(3)"),
        ("Redo", 1, "choice(3)"),
        ("Fail", 1, "choice(X)"),
        ("Fail", 0, "top(X)"),
    ]


def test_backjump_into_last_clause_fails_the_target(run, answer_texts, events):
    result = run(LAST_CHILD, "top(X, Y)", Mode.NATIVE_BJ)
    assert answer_texts(result) == ["X=2, Y=2"]
    trace = events(result)
    jump = next(position for position, event in enumerate(trace) if event[0] == "Backjump")
    assert trace[jump + 1:jump + 6] == [
        ("Redo", 2, "choice(2)"),
        ("Fail", 2, "choice(Y)"),
        ("Redo", 1, "outer(1)"),
        ("Exit", 1, "outer(2)"),
        ("Call", 8, "choice(Y)"),
    ]


@pytest.mark.parametrize("source", [CHOICE_POINTS, LAST_CHILD])
def test_backjump_traces_are_well_formed(run, source):
    query = "top(X)" if source is CHOICE_POINTS else "top(X, Y)"
    assert check_byrd(run(source, query, Mode.NATIVE_BJ).trace) == []


def test_backjump_into_a_running_target_retries_its_next_clause(run, answer_texts, events):
    result = run(RUNNING_TARGET, "choice(X)", Mode.NATIVE_BJ)
    assert answer_texts(result) == ["X=2"]
    trace = events(result)
    jump = next(position for position, event in enumerate(trace) if event[0] == "Backjump")
    assert trace[jump:jump + 3] == [
        ("Backjump", 4, "backjump(c)"),
        ("Redo", 0, "choice(X)"),
        ("Exit", 0, "choice(2)"),
    ]
    assert check_byrd(result.trace) == []


@pytest.mark.parametrize("source, query", [
    (CHOICE_POINTS, "top(X)"),
    (LAST_CHILD, "top(X, Y)"),
    (RUNNING_TARGET, "choice(X)"),
    ("top :- a.\na :- bt_target(k), b.\nb :- bt_target(k), backjump(k).", "top"),
])
def test_backjump_is_followed_by_redo_or_fail(run, source, query):
    trace = run(source, query, Mode.NATIVE_BJ).trace
    assert any(event.port.value == "Backjump" for event in trace)
    assert check_backjump(trace) == []


def test_check_backjump_reports_a_dangling_backjump(run):
    trace = run(CHOICE_POINTS, "top(X)", Mode.NATIVE_BJ).trace
    jump = next(position for position, event in enumerate(trace) if event.port.value == "Backjump")
    assert check_backjump(trace[:jump + 1]) == [f"event {jump}: backjump followed by end of trace"]
    assert check_backjump(trace[:jump + 1] + trace[jump + 2:jump + 3]) == [f"event {jump}: backjump followed by Call"]


def test_newest_registration_wins(run, events):
    source = """
    top :- a.
    a :- bt_target(k), b.
    b :- bt_target(k), backjump(k).
    """
    result = run(source, "top", Mode.NATIVE_BJ)
    assert result.answers == []
    assert events(result, "Backjump", "Fail") == [
        ("Backjump", 5, "backjump(k)"),
        ("Fail", 3, "b"),
        ("Fail", 1, "a"),
        ("Fail", 0, "top"),
    ]


def test_registration_is_withdrawn_on_backtracking(run):
    source = """
    p :- q, backjump(k).
    q :- bt_target(k).
    q.
    """
    with pytest.raises(BackjumpTargetError) as error:
        run(source, "p", Mode.NATIVE_BJ)
    ports = [event.port.value for event in error.value.result.trace]
    assert ports.count("Backjump") == 2


def test_btid_target_skips_choice_points_inside_the_clause(run, answer_texts):
    source = """
    pick(X, Id) :- btid([], Id), member3(X).
    member3(1).
    member3(2).
    member3(3).
    run(X) :- pick(X, Id), check(X, Id).
    check(1, Id) :- backjump(Id).
    check(3, _).
    """
    assert answer_texts(run(source, "run(X)", Mode.NATIVE_BJ)) == []


def test_native_backjump_differs_from_catch_and_throw(run, answer_texts):
    native = """
    run(X) :- pick(X), test(X).
    pick(1) :- bt_target(t).
    pick(2) :- bt_target(t).
    pick(3) :- bt_target(t).
    test(1) :- backjump(t).
    test(3).
    """
    with_catch = """
    run(X) :- catch((pick(X), test(X)), t, fail).
    pick(1).
    pick(2).
    pick(3).
    test(1) :- throw(t).
    test(3).
    """
    assert answer_texts(run(native, "run(X)", Mode.NATIVE_BJ)) == ["X=3"]
    assert answer_texts(run(with_catch, "run(X)")) == []
