"""The SAT programs used throughout the corpus, as source text"""

from app.reader.logic import parse_program
from app.reader.models import Program
from app.transform.enums import IdPolicy
from app.transform.logic import annotate_native, dbsim
from app.transform.schemas import BackjumpSpec

NEW_HIGHEST = """
new_highest( V, H, H ) :- var( V ).
new_highest( V, H, H ) :- nonvar( V ), V=(L,_Value), H>=L.
new_highest( V, H, L ) :- nonvar( V ), V=(L,_Value), H<L.
"""

P1 = """
sat_cl( [Pol-Pol|Pairs] ).
sat_cl( [H|Pairs] ) :- sat_cl( Pairs ).
sat_cnf( [] ).
sat_cnf( [Clause|Clauses] ) :-
        sat_cl( Clause ), sat_cnf( Clauses ).
"""

SAT_CL_LEVELED = """
sat_cl( [Pol-V|_Pairs], _L, _HL ) :-
        nonvar(V), V=(_,Pol).
sat_cl( [Pol-V|_Pairs], L, _HL ) :-
        var(V), V=(L,Pol).
sat_cl( [_-V|Pairs], L, HL ) :-
        new_highest( V, HL, HLnew ),
        sat_cl( Pairs, L, HLnew ).
"""

SAT_CL_THROW = """
sat_cl( [], _, HL ) :- HL>=0, throw( HL ).
"""

P2 = SAT_CL_LEVELED + NEW_HIGHEST + """
sat_cnf( [], _L ).
sat_cnf( [Clause|Clauses], L ) :-
        sat_cl( Clause, L, -1 ),
        Lnew is L+1,
        sat_cnf( Clauses, Lnew ).
"""

P3 = SAT_CL_LEVELED + SAT_CL_THROW + NEW_HIGHEST + """
sat_cnf( [], _L ).
sat_cnf( [Clause|Clauses], L ) :-
        sat_cl( Clause, L, -1 ),
        Lnew is L+1,
        catch( sat_cnf( Clauses, Lnew ),
               L,
               fail
              ).
"""

PB = """
sat_b( [] ).
sat_b( [[Pol-Pol|_]|Clauses] ) :- sat_b( Clauses ).
sat_b( [[_|Pairs]|Clauses] ) :- sat_b( [Pairs|Clauses] ).
"""

SAT_B_EMPTY = """
sat_b( [], _L, _HL ).
"""

SAT_B_NONVAR = """
sat_b( [[Pol-V|_] | Clauses], L, _HL ) :- nonvar(V),
        V=(_,Pol), Lnew is L+1,
        sat_b( Clauses, Lnew, -1 ).
"""

SAT_B_VAR = """
sat_b( [[Pol-V|_] | Clauses], L, _HL ) :- var(V),
        V=(L,Pol), Lnew is L+1,
        sat_b( Clauses, Lnew, -1 ).
"""

SAT_B_SKIP = """
sat_b( [[_-V|Pairs] | Clauses], L, HL ) :-
        Lnew is L+1,
        new_highest( V, HL, HLnew ),
        sat_b( [Pairs | Clauses], Lnew, HLnew ).
"""

SAT_B_THROW = """
sat_b( [[] | _Clauses], _L, HL ) :-  HL>=0, throw( HL ).
"""

SAT_B_VAR_CATCH = """
sat_b( [[Pol-V|_] | Clauses], L, _HL ) :-
        catch( ( var(V), V=(L,Pol), Lnew is L+1,
                 sat_b(Clauses, Lnew, -1)
               ),
               L,
               fail
             ).
"""

SAT_B_MERGED = """
sat_b( [[Pol-V|Pairs] | Clauses], L, HL ) :-
   catch( (nonvar(V), V=(_,Pol), Lnew is L+1, sat_b(Clauses, Lnew, -1)
           ; throw(L)
          ),
          L,
          catch( (var(V), V=(L,Pol), Lnew is L+1, sat_b(Clauses, Lnew, -1)
                  ; throw(L)
                 ),
                 L,
                 catch( (Lnew is L+1, new_highest(V, HL, HLnew),
                         sat_b([Pairs|Clauses], Lnew, HLnew)
                         ; throw(L)
                        ),
                        L,
                        fail
                      ) ) ).
"""

PB2 = SAT_B_EMPTY + SAT_B_NONVAR + SAT_B_VAR + SAT_B_SKIP + NEW_HIGHEST
PB2_THROW = SAT_B_EMPTY + SAT_B_NONVAR + SAT_B_VAR + SAT_B_SKIP + SAT_B_THROW + NEW_HIGHEST
PB3 = SAT_B_EMPTY + SAT_B_NONVAR + SAT_B_VAR_CATCH + SAT_B_SKIP + SAT_B_THROW + NEW_HIGHEST
PB3A = SAT_B_EMPTY + SAT_B_MERGED + SAT_B_THROW + NEW_HIGHEST

SOURCES = {
    "P1": P1,
    "P2": P2,
    "P3": P3,
    "Pb": PB,
    "Pb2": PB2,
    "Pb3": PB3,
    "Pb3a": PB3A,
}

# Goal to run with the encoded formula bound to F
QUERIES = {
    "P1": "sat_cnf(F)",
    "P2": "sat_cnf(F,0)",
    "P3": "sat_cnf(F,0)",
    "Pb": "sat_b(F)",
    "Pb2": "sat_b(F,0,-1)",
    "Pb3": "sat_b(F,0,-1)",
    "Pb3a": "sat_b(F,0,-1)",
}

# Only the var clause of sat_b/3 binds a variable, so only its node can be a target
PB_CATCH_SPEC = BackjumpSpec(
    target_procedures={"sat_b/3"},
    id_policy=IdPolicy.FROM_ARG,
    id_arg=2,
    exempt_clauses={("sat_b/3", 1), ("sat_b/3", 2), ("sat_b/3", 4), ("sat_b/3", 5)},
)

# With the database, the clause tried after the target's abandoned one does the catching
PB_DBSIM_SPEC = BackjumpSpec(
    target_procedures={"sat_b/3"},
    id_policy=IdPolicy.FROM_ARG,
    id_arg=2,
    exempt_clauses={("sat_b/3", 1), ("sat_b/3", 2), ("sat_b/3", 3), ("sat_b/3", 5)},
)

P2_SPLIT_SPEC = BackjumpSpec(
    target_procedures={"sat_cnf/2"},
    id_policy=IdPolicy.FROM_ARG,
    id_arg=2,
    split_points={("sat_cnf/2", 2): 2},
)


def build_corpus_programs() -> dict[str, Program]:
    """Parse every corpus program; keys are P1, P2, P3, Pb, Pb2, Pb3 and Pb3a."""
    return {name: parse_program(source) for name, source in SOURCES.items()}


def pb2_with_throw() -> Program:
    """Pb2 plus the clause that throws the highest level when a clause runs out of literals."""
    return parse_program(PB2_THROW)


def pb2_native() -> Program:
    """Pb2 backjumping natively: the var clause registers its level, the empty clause backjumps."""
    return annotate_native(pb2_with_throw(), PB_CATCH_SPEC)


def pb2_dbsim() -> Program:
    """Pb2 simulating the backjump with target/1 facts."""
    return dbsim(pb2_with_throw(), PB_DBSIM_SPEC)
