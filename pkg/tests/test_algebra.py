import itertools

import numpy as np
import pytest

from conftest import kind_instances
from stpx.algebra import (
    LogicalMatrix,
    delta_vector,
    dump_dense,
    dump_logical,
    encode_state,
    khatri_rao,
    kronecker,
    matmul,
    parse_logical,
    stp,
    structure_matrix,
    table1_matrix,
    transition_structure_matrix,
)
from stpx.logic import MValuedFunction, identity_function
from stpx.states import LatticeSpec, delta_index, state_at
from stpx.transitions import TransitionSpec, standard_transition

M1 = [[1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]]
M2 = [[0, 0, 0, 0], [1, 1, 0, 0], [0, 0, 0, 0], [0, 0, 1, 1]]
M3 = [[1, 0, 0, 0], [0, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 1]]


def random_logical(rng, rows, cols):
    return LogicalMatrix(rows, rng.integers(1, rows + 1, size=cols))


def dense_stp(a, b):
    """Semi-tensor product computed straight from dense Kronecker products."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    t = np.lcm(a.shape[1], b.shape[0])
    return np.kron(a, np.eye(t // a.shape[1])) @ np.kron(b, np.eye(t // b.shape[0]))


def test_logical_matrix_validation():
    with pytest.raises(ValueError):
        LogicalMatrix(2, np.array([1, 3]))
    with pytest.raises(ValueError):
        LogicalMatrix.from_dense([[1, 1], [1, 0]])
    a = LogicalMatrix.from_dense(M3)
    assert a == LogicalMatrix.delta(4, [1, 3, 3, 4])
    np.testing.assert_array_equal(a.to_dense(), M3)


def test_kronecker_examples():
    right_exit = kronecker(LogicalMatrix.identity(2), LogicalMatrix.delta(2, [2, 2]))
    np.testing.assert_array_equal(right_exit.to_dense(), M2)
    x = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(kronecker(x, np.array([[1.0]])), x)
    eye = LogicalMatrix.delta(2, [1, 2])
    assert kronecker(eye, eye) == LogicalMatrix.identity(4)


def test_kronecker_logical_matches_dense():
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = random_logical(rng, *rng.integers(1, 5, size=2))
        y = random_logical(rng, *rng.integers(1, 5, size=2))
        np.testing.assert_array_equal(kronecker(x, y).to_dense(), np.kron(x.to_dense(), y.to_dense()))


def test_stp_examples():
    assert stp(delta_vector(2, 1), delta_vector(2, 0)) == LogicalMatrix.delta(4, [2])
    assert encode_state((0, 1, 1)) == LogicalMatrix.delta(8, [5])


def test_stp_is_matmul_when_conforming():
    rng = np.random.default_rng(1)
    for _ in range(100):
        r, c, k = rng.integers(1, 6, size=3)
        a, b = rng.normal(size=(r, c)), rng.normal(size=(c, k))
        np.testing.assert_allclose(stp(a, b), a @ b, rtol=1e-12, atol=1e-12)


def test_stp_logical_matches_dense():
    rng = np.random.default_rng(2)
    for _ in range(100):
        x = random_logical(rng, rng.integers(1, 5), rng.integers(1, 7))
        y = random_logical(rng, rng.integers(1, 7), rng.integers(1, 4))
        np.testing.assert_array_equal(stp(x, y).to_dense(), dense_stp(x.to_dense(), y.to_dense()))


def test_stp_general_dense_dimensions():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=(2, 4)), rng.normal(size=(2, 3))
    out = stp(a, b)
    assert out.shape == (2, 6)
    np.testing.assert_allclose(out, np.kron(a, np.eye(1)) @ np.kron(b, np.eye(2)))


def test_khatri_rao_examples():
    f1 = LogicalMatrix.delta(3, [1, 1, 1, 2, 2, 2, 1, 1, 1])
    f2 = LogicalMatrix.delta(3, [1, 2, 3, 1, 2, 3, 1, 2, 3])
    assert khatri_rao(f1, f2) == LogicalMatrix.delta(9, [1, 2, 3, 4, 5, 6, 1, 2, 3])
    x = LogicalMatrix.delta(4, [2, 4, 1])
    assert khatri_rao(x, LogicalMatrix.delta(1, [1, 1, 1])) == x
    eye = LogicalMatrix.delta(2, [1, 2])
    assert khatri_rao(eye, eye) == LogicalMatrix.delta(4, [1, 4])
    with pytest.raises(ValueError):
        khatri_rao(eye, LogicalMatrix.delta(2, [1]))


def test_khatri_rao_logical_matches_dense():
    rng = np.random.default_rng(4)
    for _ in range(100):
        k = int(rng.integers(1, 8))
        x, y = random_logical(rng, rng.integers(1, 5), k), random_logical(rng, rng.integers(1, 5), k)
        dense = np.column_stack([np.kron(x.to_dense()[:, j], y.to_dense()[:, j]) for j in range(k)])
        np.testing.assert_array_equal(khatri_rao(x, y).to_dense(), dense)
        np.testing.assert_array_equal(khatri_rao(x.to_dense(), y.to_dense()), dense)


def test_matmul_logical():
    rng = np.random.default_rng(5)
    x, y = random_logical(rng, 3, 4), random_logical(rng, 4, 5)
    np.testing.assert_array_equal(matmul(x, y).to_dense(), x.to_dense() @ y.to_dense())


def example_boolean_function():
    return MValuedFunction.from_scalar(lambda p, q, r: int((p and not q) or (r and p)), 3, 2)


def test_structure_matrix_boolean_example():
    assert structure_matrix(example_boolean_function()) == LogicalMatrix.delta(2, [1, 2, 1, 1, 2, 2, 2, 2])


def test_structure_matrix_columns_follow_boolean_rule():
    """For m = 2 column j is [f(x); not f(x)] for the state x of delta index j."""
    f = example_boolean_function()
    dense = structure_matrix(f).to_dense()
    L = LatticeSpec(3, 2)
    for j in range(1, 9):
        v = f(state_at(j, L))
        assert list(dense[:, j - 1]) == [v, 1 - v]


def test_structure_matrix_species_entry_example():
    f1 = MValuedFunction.from_scalar(lambda x1, x2: x1 if x1 != 0 else 2, 2, 3)
    f2 = MValuedFunction.from_scalar(lambda x1, x2: x2, 2, 3)
    assert structure_matrix(f1) == LogicalMatrix.delta(3, [1, 1, 1, 2, 2, 2, 1, 1, 1])
    assert structure_matrix(f2) == LogicalMatrix.delta(3, [1, 2, 3, 1, 2, 3, 1, 2, 3])
    assert structure_matrix(identity_function(LatticeSpec(2, 3), 2)) == structure_matrix(f2)


@pytest.mark.parametrize("n,m", [(1, 2), (4, 2), (7, 2), (2, 3), (4, 3), (3, 5), (2, 9)])
def test_structure_identities_exhaustive(n, m):
    """stp-fold of site encodings is delta_{m^N}^{delta_index}, and M_f picks out f's value."""
    L = LatticeSpec(n, m)
    rng = np.random.default_rng(n * 100 + m)
    f = MValuedFunction.from_table(rng.integers(0, m, size=L.size), n, m)
    mf = structure_matrix(f)
    for s in itertools.product(range(m), repeat=n):
        enc = encode_state(s, m)
        assert enc == LogicalMatrix.delta(L.size, [delta_index(s, m)])
        assert stp(mf, enc) == delta_vector(m, f(s))


def test_transition_structure_matrix_examples():
    L = LatticeSpec(2, 3)
    t = standard_transition("species-entry", L, 1.0, species=2)
    assert transition_structure_matrix(t) == LogicalMatrix.delta(9, [1, 2, 3, 4, 5, 6, 1, 2, 3])
    L4 = LatticeSpec(4, 3)
    ident = TransitionSpec("noop", 1.0, tuple(identity_function(L4, i) for i in range(1, 5)), L4)
    assert transition_structure_matrix(ident) == LogicalMatrix.identity(81)


def test_transition_structure_matrix_rejects_mixed_arity():
    L = LatticeSpec(2, 2)
    bad = MValuedFunction.from_scalar(lambda a, b, c: a, 3, 2)
    with pytest.raises(ValueError):
        TransitionSpec("bad", 1.0, (bad, identity_function(L, 2)), L)


@pytest.mark.parametrize("L", [LatticeSpec(n, 2) for n in (2, 3, 4, 5)] + [LatticeSpec(3, 3), LatticeSpec(3, 4)],
                         ids=lambda L: f"N{L.n}m{L.m}")
def test_transition_matrix_matches_direct_oracle(L):
    for kind, kw in kind_instances(L):
        t = standard_transition(kind, L, 1.0, **kw)
        col = transition_structure_matrix(t).col_index
        for j in range(1, L.size + 1):
            assert col[j - 1] == delta_index(t.direct(state_at(j, L)), L.m), (t.name, j)


def test_table1_two_site_matrices():
    L = LatticeSpec(2, 2)
    np.testing.assert_array_equal(table1_matrix("left-entry", L).to_dense(), M1)
    np.testing.assert_array_equal(table1_matrix("right-exit", L).to_dense(), M2)
    np.testing.assert_array_equal(table1_matrix("hop-right", L, 1).to_dense(), M3)


def _block_grid(kind, n, i):
    """Block matrices assembled directly from identity and zero blocks."""
    def grid(pattern, s):
        I, Z = np.eye(s, dtype=int), np.zeros((s, s), dtype=int)
        return np.block([[I if v else Z for v in row] for row in pattern])
    if kind == "A":
        return grid([[1, 1], [0, 0]], 2 ** (n - i))
    if kind == "D":
        return grid([[0, 0], [1, 1]], 2 ** (n - i))
    if kind == "R":
        return grid([[1, 0, 0, 0], [0, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 1]], 2 ** (n - i - 1))
    return grid([[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 0], [0, 0, 0, 1]], 2 ** (n - i - 1))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_table1_against_dense_block_display(n):
    eye = lambda k: np.eye(k, dtype=int)
    L = LatticeSpec(n, 2)
    for i in range(1, n + 1):
        np.testing.assert_array_equal(table1_matrix("attach", L, i).to_dense(),
                                      np.kron(eye(2 ** (i - 1)), _block_grid("A", n, i)))
        np.testing.assert_array_equal(table1_matrix("detach", L, i).to_dense(),
                                      np.kron(eye(2 ** (i - 1)), _block_grid("D", n, i)))
        if i < n:
            np.testing.assert_array_equal(table1_matrix("hop-right", L, i).to_dense(),
                                          np.kron(eye(2 ** (i - 1)), _block_grid("R", n, i)))
        if i > 1:
            np.testing.assert_array_equal(table1_matrix("hop-left", L, i).to_dense(),
                                          np.kron(eye(2 ** (i - 2)), _block_grid("L", n, i - 1)))
    np.testing.assert_array_equal(table1_matrix("right-entry", L).to_dense(),
                                  np.kron(eye(2 ** (n - 1)), [[1, 1], [0, 0]]))


def test_table1_site_range():
    L = LatticeSpec(3, 2)
    with pytest.raises(ValueError):
        table1_matrix("hop-right", L, 3)
    with pytest.raises(ValueError):
        table1_matrix("hop-left", L, 1)
    with pytest.raises(ValueError):
        table1_matrix("left-entry", LatticeSpec(2, 3))


def test_dump_round_trip():
    a = LogicalMatrix.delta(4, [1, 3, 3, 4])
    assert dump_logical(a) == "delta 4 [1 3 3 4]"
    assert parse_logical(dump_logical(a)) == a
    assert dump_dense(np.array([[0.5, 0.0], [0.25, 1.0]])) == "0.5,0\n0.25,1\n"
