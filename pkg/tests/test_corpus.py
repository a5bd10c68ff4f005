import pytest
from pydantic import ValidationError

from app.corpus.enums import EncodingStyle
from app.corpus.errors import CorpusError
from app.corpus.logic import (
    answers_cover_oracle,
    diff_traces,
    dump_trace,
    encode,
    exemption_counterexamples,
    exhaustive_cnfs,
    format_dimacs,
    level_invariant_violations,
    load_trace,
    oracle,
    parse_dimacs,
    project_answer,
    project_trace,
    query_for,
    random_cnfs,
    solve_cnf,
    throw_level_violations,
)
from app.corpus.schemas import AnswerRecord, Cnf
from app.engine.enums import Mode, Port
from app.engine.logic import Engine, solve
from app.engine.schemas import Answer, TraceEvent
from app.reader.formatting import format_term
from app.reader.logic import parse_program
from app.terms.models import Compound, Const, Int
from app.transform.enums import IdPolicy
from app.transform.logic import approach1, dbsim
from app.transform.programs import (
    PB2,
    PB_DBSIM_SPEC,
    QUERIES,
    pb2_dbsim,
    pb2_native,
    pb2_with_throw,
)
from app.transform.schemas import BackjumpSpec

T, F = True, False

# (x or y) and (not z or z) and (not x or not y) and (not x or y or z)
LOST = Cnf(
    variables=("x", "y", "z"),
    clauses=(
        ((T, "x"), (T, "y")),
        ((F, "z"), (T, "z")),
        ((F, "x"), (F, "y")),
        ((F, "x"), (T, "y"), (T, "z")),
    ),
)


def assignments(result, cnf: Cnf, style: EncodingStyle) -> list[tuple]:
    return [tuple(sorted(project_answer(answer, cnf, style).assignment.items())) for answer in result.answers]


def event(port: Port, node: int, goal: str, payload: str | None = None) -> TraceEvent:
    return TraceEvent(port=port, node=node, goal=goal, payload=payload)


class TestEncoding:
    def test_encode(self):
        cnf = Cnf(variables=("x", "y", "z", "v"), clauses=(((T, "x"), (F, "y"), (T, "z")), ((F, "x"), (T, "v"))))
        assert format_term(encode(cnf)) == "[[true-X,false-Y,true-Z],[false-X,true-V]]"
        assert format_term(encode(cnf, EncodingStyle.LEVELED)) == format_term(encode(cnf))

    def test_encode_edge_cases(self):
        assert format_term(encode(Cnf())) == "[]"
        assert format_term(encode(Cnf(variables=("x",), clauses=((),)))) == "[[]]"

    def test_query_for(self):
        query = query_for("sat_cnf(F,0)", Cnf(variables=("x",), clauses=(((T, "x"),),)))
        assert format_term(query) == "sat_cnf([[true-X]],0)"
        with pytest.raises(CorpusError):
            query_for("sat_cnf(G)", Cnf())

    @pytest.mark.parametrize("fields", [
        {"variables": ("x", "x")},
        {"variables": ("x",), "clauses": (((T, "y"),),)},
    ])
    def test_invalid_cnf(self, fields):
        with pytest.raises(ValidationError):
            Cnf(**fields)


class TestOracle:
    def test_truth_tables(self):
        disjunction = Cnf(variables=("x", "y"), clauses=(((T, "x"), (T, "y")),))
        assert oracle(disjunction) == {(T, T), (T, F), (F, T)}
        assert oracle(Cnf(variables=("x",), clauses=(((T, "x"),), ((F, "x"),)))) == set()
        assert (F, T, T) in oracle(LOST)

    def test_too_many_variables(self):
        with pytest.raises(CorpusError):
            oracle(Cnf(variables=tuple(f"x{index}" for index in range(21))))

    def test_verdict_reports_unsound_and_missing(self):
        cnf = Cnf(variables=("x",), clauses=(((T, "x"),),))
        verdict = answers_cover_oracle([AnswerRecord(assignment={"x": F})], cnf)
        assert not verdict.sound and not verdict.complete
        assert verdict.unsound == [{"x": F}]
        assert verdict.missing == [{"x": T}]

    def test_unbound_variables_stand_for_both_values(self):
        cnf = Cnf(variables=("x", "y"), clauses=(((T, "x"),),))
        verdict = answers_cover_oracle([AnswerRecord(assignment={"x": T})], cnf)
        assert verdict.holds

    def test_project_leveled_answer(self):
        cnf = Cnf(variables=("x", "y"), clauses=())
        answer = Answer(bindings={"X": Compound(",", (Int(0), Const("true")))})
        record = project_answer(answer, cnf, EncodingStyle.LEVELED)
        assert record.assignment == {"x": T}
        assert record.bindings == {"X": "(0,true)"}

    def test_p1_on_a_small_formula(self, corpus_programs):
        cnf = Cnf(variables=("x", "y"), clauses=(((T, "x"), (F, "y")),))
        result = solve_cnf(corpus_programs["P1"], QUERIES["P1"], cnf)
        assert [answer.text() for answer in result.answers] == ["X=true", "Y=false"]
        assert answers_cover_oracle(result.answers, cnf).holds


class TestFormulas:
    def test_random_cnfs_are_reproducible(self):
        assert random_cnfs(seed=7, count=5) == random_cnfs(seed=7, count=5)
        formulas = random_cnfs(count=50)
        assert len(formulas) == 50
        assert all(1 <= len(cnf.variables) <= 4 and 1 <= len(cnf.clauses) <= 5 for cnf in formulas)
        assert all(1 <= len(clause) <= 3 for cnf in formulas for clause in cnf.clauses)

    def test_exhaustive_cnfs(self):
        assert len(exhaustive_cnfs(1, 1)) == 4
        assert len(exhaustive_cnfs(2)) == 121

    def test_dimacs(self):
        cnf = parse_dimacs("c example\np cnf 3 2\n1 -2 0\n3\n0\n")
        assert cnf == Cnf(variables=("x1", "x2", "x3"), clauses=(((T, "x1"), (F, "x2")), ((T, "x3"),)))
        assert format_dimacs(cnf) == "p cnf 3 2\n1 -2 0\n3 0\n"

    @pytest.mark.parametrize("text", [
        "1 0\n",
        "p cnf 1 1\n2 0\n",
        "p cnf 1 2\n1 0\n",
        "p cnf x 1\n1 0\n",
        "p cnf 1 1\n1\n",
        "p cnf 1 1\n1 a 0\n",
        "c only a comment\n",
    ])
    def test_bad_dimacs(self, text):
        with pytest.raises(CorpusError):
            parse_dimacs(text)


class TestTraces:
    NATIVE = """
    run(X) :- pick(X), test(X).
    pick(1) :- bt_target(t).
    pick(2) :- bt_target(t).
    pick(3) :- bt_target(t).
    test(1) :- backjump(t).
    test(3).
    """
    WITH_CATCH = """
    run(X) :- catch((pick(X), test(X)), t, fail).
    pick(1).
    pick(2).
    pick(3).
    test(1) :- throw(t).
    test(3).
    """

    def test_catch_run_skips_unexplored_siblings(self):
        native = solve(self.NATIVE, "run(X)", Mode.NATIVE_BJ)
        caught = solve(self.WITH_CATCH, "run(X)")
        divergence = diff_traces(native.trace, caught.trace, keep={"run/1", "pick/1", "test/1"})
        assert divergence.index == 4
        assert divergence.describe() == "traces diverge at event 4\n  a: Redo #1 pick(1)\n  b: Fail #0 run(X)"

    def test_equal_traces(self):
        trace = solve("p(1).\np(2).", "p(X)").trace
        assert diff_traces(trace, trace) is None

    def test_shorter_trace(self):
        trace = solve("p(1).\np(2).", "p(X)").trace
        divergence = diff_traces(trace, trace[:-1])
        assert divergence.index == len(trace) - 1
        assert divergence.right is None
        assert divergence.describe().endswith("b: <end of trace>")

    def test_projection_drops_bookkeeping(self):
        trace = solve(self.WITH_CATCH, "run(X)").trace
        projected = project_trace(trace)
        goals = {entry.goal.split("(")[0] for entry in projected}
        assert {"run", "pick", "test"} <= goals
        assert not goals & {"catch", "throw"}
        assert [entry.node for entry in projected[:3]] == [0, 1, 1]

    def test_projection_keeps_answers_and_renames_generated_variables(self):
        trace = [
            event(Port.CALL, 7, "p(_G17,_G3)"),
            event(Port.BLOCK, 8, "when(nonvar(_G3),true)"),
            event(Port.EXIT, 7, "p(_G17,a)"),
            event(Port.ANSWER, 9, "p(_G17,a)"),
        ]
        projected = project_trace(trace, keep={"p/2"})
        assert [(entry.port, entry.node, entry.goal) for entry in projected] == [
            (Port.CALL, 0, "p(_G0,_G1)"),
            (Port.EXIT, 0, "p(_G0,a)"),
            (Port.ANSWER, 1, "p(_G0,a)"),
        ]

    def test_p2_and_p3_agree_when_nothing_is_thrown(self, corpus_programs):
        cnf = Cnf(variables=("x", "y"), clauses=(((T, "x"),), ((T, "y"),)))
        p2 = solve_cnf(corpus_programs["P2"], QUERIES["P2"], cnf)
        p3 = solve_cnf(corpus_programs["P3"], QUERIES["P3"], cnf)
        assert not any(entry.port is Port.THROW for entry in p3.trace)
        assert diff_traces(p2.trace, p3.trace, keep={"sat_cnf/2", "sat_cl/3", "new_highest/3"}) is None

    def test_dump_and_load(self, tmp_path):
        trace = solve("p(1).\np(2).", "p(X)").trace
        path = tmp_path / "trace.jsonl"
        dump_trace(trace, path)
        loaded = load_trace(path)
        assert diff_traces(trace, loaded) is None
        assert loaded[0].term is None

    def test_load_rejects_bad_lines(self, tmp_path):
        path = tmp_path / "trace.jsonl"
        path.write_text('{"port": "Call", "node": 0, "goal": "p"}\nnot json\n')
        with pytest.raises(CorpusError):
            load_trace(path)


class TestInvariantCheckers:
    def test_level_invariant(self):
        assert level_invariant_violations([event(Port.CALL, 0, "sat_cl([true-(0,true)],1,-1)")], "sat_cl/3") == []
        assert level_invariant_violations([event(Port.CALL, 0, "sat_cl([true-(0,true)],0,-1)")], "sat_cl/3") != []
        assert level_invariant_violations([event(Port.CALL, 0, "sat_b([],2,2)")], "sat_b/3") != []

    def test_throw_level(self):
        good = [event(Port.CALL, 0, "sat_cl([],2,1)"), event(Port.THROW, 1, "throw(1)", "1")]
        bad = [event(Port.CALL, 0, "sat_cl([],2,1)"), event(Port.THROW, 1, "throw(0)", "0")]
        assert throw_level_violations(good, "sat_cl/3") == []
        assert throw_level_violations(bad, "sat_cl/3") != []

    def test_exemption_counterexamples(self):
        assert exemption_counterexamples([event(Port.CATCH, 0, "catch((nonvar(V),true),1,fail)")]) != []
        assert exemption_counterexamples([event(Port.CATCH, 0, "catch((var(V),true),1,fail)")]) == []


def test_lost_answers(corpus_programs):
    assert any(model[2] for model in oracle(LOST))
    for name in ("P3", "Pb3"):
        result = solve_cnf(corpus_programs[name], QUERIES[name], LOST)
        records = [project_answer(answer, LOST, EncodingStyle.LEVELED) for answer in result.answers]
        assert records
        assert not any(record.assignment.get("z") for record in records)
        verdict = answers_cover_oracle(records, LOST)
        assert verdict.sound and not verdict.complete
        assert all(missing["z"] for missing in verdict.missing)


def test_dbsim_leaves_no_target_behind():
    engine = Engine(pb2_dbsim())
    list(engine.answers(query_for(QUERIES["Pb2"], LOST)))
    assert engine.database.clauses("target/1") == []


@pytest.fixture(scope="module")
def corpus_cnfs():
    return random_cnfs()


@pytest.mark.corpus
def test_p1_matches_the_oracle(corpus_programs, corpus_cnfs):
    for cnf in [*corpus_cnfs, *exhaustive_cnfs(2)]:
        result = solve_cnf(corpus_programs["P1"], QUERIES["P1"], cnf)
        verdict = answers_cover_oracle(result.answers, cnf)
        assert verdict.holds, (cnf, verdict)


@pytest.mark.corpus
@pytest.mark.parametrize("name, indicator", [("P2", "sat_cl/3"), ("Pb2", "sat_b/3")])
def test_leveled_programs_match_p1(corpus_programs, corpus_cnfs, name, indicator):
    for cnf in corpus_cnfs:
        expected = assignments(solve_cnf(corpus_programs["P1"], QUERIES["P1"], cnf), cnf, EncodingStyle.PLAIN)
        result = solve_cnf(corpus_programs[name], QUERIES[name], cnf)
        assert set(assignments(result, cnf, EncodingStyle.LEVELED)) == set(expected), cnf
        assert level_invariant_violations(result.trace, indicator) == []


@pytest.mark.corpus
@pytest.mark.parametrize("name, indicator", [("P3", "sat_cl/3"), ("Pb3", "sat_b/3")])
def test_backjumping_programs_stay_sound(corpus_programs, corpus_cnfs, name, indicator):
    for cnf in corpus_cnfs:
        result = solve_cnf(corpus_programs[name], QUERIES[name], cnf)
        assert answers_cover_oracle(result.answers, cnf, EncodingStyle.LEVELED).sound, cnf
        assert throw_level_violations(result.trace, indicator) == []
        assert level_invariant_violations(result.trace, indicator) == []


@pytest.mark.corpus
def test_native_backjump_matches_catch_version(corpus_programs, corpus_cnfs):
    native_program = pb2_native()
    for cnf in corpus_cnfs:
        native = solve_cnf(native_program, QUERIES["Pb2"], cnf, Mode.NATIVE_BJ)
        caught = solve_cnf(corpus_programs["Pb3"], QUERIES["Pb3"], cnf)
        assert [answer.text() for answer in native.answers] == [answer.text() for answer in caught.answers]
        assert diff_traces(native.trace, caught.trace, keep={"sat_b/3"}) is None, cnf


@pytest.mark.corpus
def test_merged_clause_matches_catch_version(corpus_programs, corpus_cnfs):
    for cnf in corpus_cnfs:
        merged = solve_cnf(corpus_programs["Pb3a"], QUERIES["Pb3a"], cnf)
        caught = solve_cnf(corpus_programs["Pb3"], QUERIES["Pb3"], cnf)
        assert [answer.text() for answer in merged.answers] == [answer.text() for answer in caught.answers], cnf


@pytest.mark.corpus
def test_database_simulation_matches_native_backjump(corpus_cnfs):
    native_program, simulated_program = pb2_native(), pb2_dbsim()
    untransformed, guarded = parse_program(PB2), dbsim(parse_program(PB2), PB_DBSIM_SPEC)
    for cnf in corpus_cnfs:
        native = solve_cnf(native_program, QUERIES["Pb2"], cnf, Mode.NATIVE_BJ)
        simulated = solve_cnf(simulated_program, QUERIES["Pb2"], cnf)
        style = EncodingStyle.LEVELED
        assert assignments(simulated, cnf, style) == assignments(native, cnf, style), cnf

        plain = solve_cnf(untransformed, QUERIES["Pb2"], cnf)
        wrapped = solve_cnf(guarded, QUERIES["Pb2"], cnf)
        assert diff_traces(plain.trace, wrapped.trace, project=True) is None, cnf


@pytest.mark.corpus
def test_no_catch_in_exempt_clauses(corpus_programs, corpus_cnfs):
    fully_wrapped = pb2_with_throw()
    spec = BackjumpSpec(target_procedures={"sat_b/3"}, id_policy=IdPolicy.FROM_ARG, id_arg=2)
    fully_wrapped.procedures["sat_b/3"] = approach1(fully_wrapped.clauses("sat_b/3"), spec)
    for cnf in corpus_cnfs:
        for program in (corpus_programs["Pb3"], fully_wrapped):
            trace = solve_cnf(program, QUERIES["Pb3"], cnf).trace
            assert exemption_counterexamples(trace) == [], cnf

