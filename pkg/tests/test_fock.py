import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermosym.errors import InvalidDimensionError, ShapeError, TruncationWindowError
from thermosym.fock import (
    COLUMN_STACKING,
    DensityState,
    SuperOp,
    commutator,
    devectorize,
    doubled_commutators_check,
    doubled_ops,
    left,
    lift_left,
    lift_right,
    make_fock_rep,
    project,
    right,
    vectorize,
    window_indices,
)

from conftest import random_density


def test_two_level_ladder():
    rep = make_fock_rep(2)
    assert np.array_equal(rep.a, [[0, 1], [0, 0]])


def test_sqrt_rule():
    assert make_fock_rep(3).a[1, 2] == pytest.approx(np.sqrt(2))


def test_position_momentum_definitions():
    rep = make_fock_rep(6)
    np.testing.assert_allclose(rep.x_hat, (rep.a + rep.a_dag) / np.sqrt(2))
    np.testing.assert_allclose(rep.p_hat, (rep.a - rep.a_dag) / (1j * np.sqrt(2)))
    np.testing.assert_allclose(rep.a_dag, rep.a.conj().T)


def test_commutator_exact_below_top_level():
    rep = make_fock_rep(8)
    defect = commutator(rep.a, rep.a_dag) - rep.identity
    assert np.linalg.norm(defect[:7, :7]) < 1e-14
    assert defect[7, 7] == -8


def test_canonical_xp_interior():
    rep = make_fock_rep(10)
    c = commutator(rep.x_hat, rep.p_hat)
    np.testing.assert_allclose(c[:9, :9], 1j * np.eye(9), atol=1e-14)


@pytest.mark.parametrize("bad", [0, 1, -3, 2.5])
def test_invalid_dimension(bad):
    with pytest.raises(InvalidDimensionError):
        make_fock_rep(bad)


def test_matrices_are_read_only():
    rep = make_fock_rep(4)
    with pytest.raises(ValueError):
        rep.a[0, 1] = 5


def test_vectorize_round_trip(rng):
    v = rng.normal(size=25) + 1j * rng.normal(size=25)
    np.testing.assert_array_equal(vectorize(devectorize(v)), v)


def test_vacuum_vector_index():
    rho = np.zeros((2, 2))
    rho[0, 0] = 1
    v = vectorize(rho)
    assert v[0] == 1 and np.count_nonzero(v) == 1


def test_column_stacking_index():
    # rho[m, n] sits at m + N n
    rho = np.zeros((4, 4))
    rho[1, 2] = 1
    assert np.flatnonzero(vectorize(rho)).tolist() == [1 + 4 * 2]


def test_trace_from_diagonal_positions(rng):
    rho = random_density(5, rng)
    v = vectorize(rho)
    assert np.sum(v[[m + 5 * m for m in range(5)]]) == pytest.approx(np.trace(rho))


def test_devectorize_rejects_non_square_length():
    with pytest.raises(ShapeError):
        devectorize(np.zeros(7))


def test_lift_identity_is_identity():
    assert np.array_equal(lift_left(np.eye(3)).matrix, np.eye(9))


def test_lift_shape_mismatch():
    with pytest.raises(ShapeError):
        lift_left(np.eye(3), dim=4)
    with pytest.raises(ShapeError):
        lift_right(np.ones((2, 3)))


def test_doubled_pair_gives_a_rho_adag(rng):
    rep = make_fock_rep(6)
    ops = doubled_ops(rep)
    rho = random_density(6, rng)
    got = devectorize(ops.A @ ops.At @ vectorize(rho))
    np.testing.assert_allclose(got, rep.a @ rho @ rep.a_dag, atol=1e-14)


def test_left_right_commute():
    rep = make_fock_rep(6)
    assert np.linalg.norm(commutator(left(rep.a), right(rep.a))) == 0.0


@given(st.integers(2, 6), st.integers(0, 2**31 - 1))
def test_lift_actions_and_homomorphisms(dim, seed):
    rng = np.random.default_rng(seed)
    x, y, rho = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)) for _ in range(3))
    np.testing.assert_allclose(lift_left(x).apply(rho), x @ rho, atol=1e-12)
    np.testing.assert_allclose(lift_right(y).apply(rho), rho @ y, atol=1e-12)
    np.testing.assert_allclose(left(x @ y), left(x) @ left(y), atol=1e-10)
    np.testing.assert_allclose(right(x @ y), right(y) @ right(x), atol=1e-10)
    np.testing.assert_allclose(left(x) @ right(y), right(y) @ left(x), atol=1e-10)


def test_superop_algebra(rng):
    rep = make_fock_rep(3)
    a, b = lift_left(rep.a), lift_right(rep.a_dag)
    rho = random_density(3, rng)
    np.testing.assert_allclose((a + b).apply(rho), rep.a @ rho + rho @ rep.a_dag, atol=1e-14)
    np.testing.assert_allclose((2 * a - b).matrix, 2 * a.matrix - b.matrix)
    np.testing.assert_allclose((a @ b).apply(rho), rep.a @ rho @ rep.a_dag, atol=1e-14)
    assert a.convention == COLUMN_STACKING
    assert a.with_params(b=1.0).params == {"b": 1.0}
    with pytest.raises(ShapeError):
        SuperOp(3, np.eye(8))
    with pytest.raises(ShapeError):
        a + lift_left(np.eye(2))


def test_density_state_helpers(rng):
    rho = random_density(4, rng)
    s = DensityState(rho)
    assert s.is_physical()
    assert DensityState.from_vector(s.vector).matrix.tolist() == s.matrix.tolist()
    rep = make_fock_rep(4)
    assert s.expect(rep.number) == pytest.approx(np.trace(rep.number @ rho))
    with pytest.raises(ShapeError):
        DensityState(np.zeros((2, 3)))


def test_window_indices():
    assert window_indices(4, 1).tolist() == [0, 1, 4, 5]
    with pytest.raises(TruncationWindowError):
        window_indices(4, 4)
    assert project(np.eye(16), 4, 1).shape == (4, 4)


def test_commutators_interior():
    rep = make_fock_rep(10)
    rpt = doubled_commutators_check(rep, 8)
    assert all(v < 1e-12 for v in rpt.residuals.values())
    assert rpt.passed() and not rpt.edge_included


def test_commutators_edge_flagged():
    rpt = doubled_commutators_check(make_fock_rep(10), 9)
    assert rpt.edge_included and not rpt.passed()
    assert rpt.edge_defect == -10
    assert rpt.ladder > 1


def test_difference_operator_is_normal_small_dim():
    assert doubled_commutators_check(make_fock_rep(4), 2).difference_normal < 1e-12


def test_window_too_large():
    with pytest.raises(TruncationWindowError):
        doubled_commutators_check(make_fock_rep(5), 5)


@given(st.integers(3, 9))
def test_interior_algebra_all_sizes(dim):
    rpt = doubled_commutators_check(make_fock_rep(dim), dim - 2)
    assert max(rpt.residuals.values()) < 1e-12
