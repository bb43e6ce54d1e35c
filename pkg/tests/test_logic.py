import pytest

from synopt.errors import InputError, UnboundVariable, UnknownSymbol
from synopt.logic import (
    FALSE,
    TRUE,
    And,
    Const,
    Eq,
    FiniteStructure,
    FOAtom,
    GroundAtom,
    Implies,
    Not,
    Or,
    PrenexUniversal,
    Query,
    SO,
    SOAssignment,
    SOAtom,
    Symbol,
    Vocabulary,
    atoms,
    eval_qf,
    free_vars,
    partial_eval,
    satisfies,
)

E = Symbol("E", 2)
S = Symbol("S", 1, SO)
VOCAB = Vocabulary((E,), ("c",))


def triangle():
    return FiniteStructure(("a", "b", "c0"), {"E": frozenset({("a", "b"), ("b", "c0"), ("c0", "a")})},
                           {"c": "a"}, VOCAB)


def test_structure_rejects_bad_tuples():
    with pytest.raises(InputError):
        FiniteStructure(("a",), {"E": frozenset({("a",)})}, {}, VOCAB)
    with pytest.raises(InputError):
        FiniteStructure(("a",), {"E": frozenset({("a", "z")})}, {}, VOCAB)
    with pytest.raises(InputError):
        FiniteStructure(("a", "a"), {"E": frozenset()}, {}, VOCAB)
    with pytest.raises(UnknownSymbol):
        FiniteStructure(("a",), {"F": frozenset()}, {}, VOCAB)


def test_vocabulary_duplicates():
    with pytest.raises(InputError):
        Vocabulary((E, Symbol("E", 1)))
    with pytest.raises(InputError):
        Symbol("R", 0)


def test_holds_and_constants():
    A = triangle()
    assert A.holds("E", ("a", "b"))
    assert not A.holds("E", ("b", "a"))
    assert A.constant("c") == "a"
    with pytest.raises(UnknownSymbol):
        A.constant("nope")


def test_so_assignment_tables():
    so = SOAssignment.from_sets(("a", "b"), (S,), {"S": [("b",)]})
    assert so.flat() == (False, True)
    assert so.holds("S", ("b",))
    assert so.true_tuples("S") == [("b",)]
    with pytest.raises(InputError):
        SOAssignment.from_flat(("a", "b"), (S,), (True,))


def test_eval_qf_connectives():
    A = triangle()
    so = SOAssignment.from_sets(A.universe, (S,), {"S": [("a",)]})
    f = And((FOAtom("E", ("x", "y")), SOAtom("S", ("x",))))
    assert eval_qf(A, so, {"x": "a", "y": "b"}, f)
    assert not eval_qf(A, so, {"x": "b", "y": "c0"}, f)
    g = Implies(SOAtom("S", ("x",)), Eq("x", Const("c")))
    assert all(eval_qf(A, so, {"x": e}, g) for e in A.universe)
    assert eval_qf(A, so, {}, GroundAtom("S", ("a",)))


def test_unbound_variable():
    A = triangle()
    so = SOAssignment.from_sets(A.universe, (S,), {})
    with pytest.raises(UnboundVariable):
        eval_qf(A, so, {}, SOAtom("S", ("x",)))


def test_satisfies_universal():
    A = triangle()
    closed = SOAssignment.from_sets(A.universe, (S,), {"S": [("a",), ("b",), ("c0",)]})
    open_ = SOAssignment.from_sets(A.universe, (S,), {"S": [("a",)]})
    f = PrenexUniversal(("y",), Or((Not(FOAtom("E", ("x", "y"))), Not(SOAtom("S", ("x",))), SOAtom("S", ("y",)))))
    assert satisfies(A, closed, {"x": "a"}, f)
    assert not satisfies(A, open_, {"x": "a"}, f)


def test_partial_eval_folds_first_order():
    A = triangle()
    f = Or((FOAtom("E", ("x", "y")), SOAtom("S", ("y",))))
    assert partial_eval(f, A, {"x": "a", "y": "b"}) == TRUE
    assert partial_eval(f, A, {"x": "b", "y": "a"}) == GroundAtom("S", ("a",))
    g = And((FOAtom("E", ("x", "y")), SOAtom("S", ("y",))))
    assert partial_eval(g, A, {"x": "b", "y": "a"}) == FALSE


def test_query_validation():
    vocab = VOCAB.extend([S])
    q = Query(("x",), SOAtom("S", ("x",)), vocab)
    assert not q.is_pi1 and q.so_symbols == (S,)
    with pytest.raises(UnboundVariable):
        Query((), SOAtom("S", ("x",)), vocab)
    with pytest.raises(InputError):
        Query(("x",), PrenexUniversal(("x",), SOAtom("S", ("x",))), vocab)


def test_free_vars_and_atoms():
    f = PrenexUniversal(("y",), And((FOAtom("E", ("x", "y")), SOAtom("S", (Const("c"),)))))
    assert free_vars(f) == {"x"}
    assert list(atoms(f)) == [FOAtom("E", ("x", "y")), SOAtom("S", (Const("c"),))]
