import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermosym.errors import AmbiguityError, NumericError, ShapeError
from thermosym.fock import make_fock_rep
from thermosym.superops import MMEParams, build_K, build_K0
from thermosym.spectral import (
    eigen_spectrum,
    evolve,
    extract_decay_rate,
    match_spectrum,
    predicted_spectrum,
    predicted_zmn,
    stationary_state,
    thermal_populations,
    thermal_state,
    trusted_order,
)


def test_predicted_examples():
    assert predicted_zmn(0, 0, 1, 1.0, 0.2) == 0
    assert predicted_zmn(1, 0, 1, 1.0, 0.2) == pytest.approx(-0.2j)
    assert predicted_zmn(1, 1, 1, 1.0, 0.2) == pytest.approx(1 - 0.1j)
    assert predicted_zmn(1, 1, -1, 1.0, 0.2) == pytest.approx(-1 - 0.1j)
    assert predicted_zmn(3, 2, -1, 2.0, 0.4) == pytest.approx(-4 - 0.8j)


@pytest.mark.parametrize("m, n, sign", [(0, 1, 1), (-1, -1, 1), (1.5, 0, 1), (2, 1, 0)])
def test_predicted_rejects(m, n, sign):
    with pytest.raises(ValueError):
        predicted_zmn(m, n, sign, 1.0, 0.2)


def test_predicted_spectrum_count():
    modes = predicted_spectrum(1.0, 0.2, 2)
    assert sorted((p.m, p.n, p.sign) for p in modes) == [(0, 0, 1), (1, 0, 1), (1, 1, -1), (1, 1, 1), (2, 0, 1)]


def test_free_spectrum():
    ev = np.sort(eigen_spectrum(build_K0(make_fock_rep(3), 1.0)).real)
    np.testing.assert_allclose(ev, [-2, -1, -1, 0, 0, 0, 1, 1, 2], atol=1e-12)


def test_nonfinite_generator():
    with pytest.raises(NumericError):
        eigen_spectrum(np.full((4, 4), np.nan))


def test_match_without_damping():
    rpt = match_spectrum(eigen_spectrum(build_K(make_fock_rep(10), MMEParams(1.0, 0.0, 1.0))), 1.0, 0.0, 4)
    assert rpt.passed


def test_match_zero_temperature_exact():
    rpt = match_spectrum(eigen_spectrum(build_K(make_fock_rep(10), MMEParams(1.0, 0.2, 0.5))), 1.0, 0.2, 8)
    assert rpt.max_delta < 1e-10


def test_match_low_orders_finite_temperature():
    K = build_K(make_fock_rep(24), MMEParams(1.0, 0.2, 1.0))
    assert match_spectrum(eigen_spectrum(K), 1.0, 0.2, 2).passed


def test_truncation_error_shrinks_with_dim():
    deltas = [
        match_spectrum(eigen_spectrum(build_K(make_fock_rep(N), MMEParams(1.0, 0.2, 1.0))), 1.0, 0.2, 2).max_delta
        for N in (12, 16, 24)
    ]
    assert deltas[0] > deltas[1] > deltas[2]


def test_negative_control_detects_wrong_frequency():
    ev = eigen_spectrum(build_K(make_fock_rep(10), MMEParams(1.0, 0.2, 0.5)))
    rpt = match_spectrum(ev, 1.1, 0.2, 4)
    assert not rpt.passed
    assert rpt.failures


def test_trusted_order():
    assert trusted_order(20) == 8
    assert trusted_order(3) == 0


@given(st.floats(0.5, 3.0), st.floats(0.0, 0.5))
def test_dissipative_and_mirror_symmetric(b, gamma):
    ev = eigen_spectrum(build_K(make_fock_rep(6), MMEParams(1.0, gamma, b)))
    assert ev.imag.max() < 1e-9
    mirror = -ev.conj()
    assert max(np.abs(ev - z).min() for z in mirror) < 1e-8


def test_thermal_stationary_state():
    rho = stationary_state(build_K(make_fock_rep(30), MMEParams(1.0, 0.2, 1.0))).matrix
    p = np.real(np.diag(rho))
    assert p[1] / p[0] == pytest.approx(1 / 3, abs=1e-8)
    np.testing.assert_allclose(p, thermal_populations(1.0, 30), atol=1e-9)


def test_vacuum_stationary_state():
    rho = stationary_state(build_K(make_fock_rep(8), MMEParams(1.0, 0.2, 0.5))).matrix
    assert abs(rho[0, 0] - 1) < 1e-10


def test_free_generator_is_ambiguous():
    with pytest.raises(AmbiguityError):
        stationary_state(build_K0(make_fock_rep(5), 1.0))


@given(st.floats(0.5, 4.0))
def test_thermal_populations_normalized(b):
    p = thermal_populations(b, 12)
    assert p.sum() == pytest.approx(1.0)
    assert np.all(np.diff(p) <= 0)


def test_vacuum_channel_decay():
    gamma = 0.2
    K = build_K(make_fock_rep(6), MMEParams(1.0, gamma, 0.5))
    rho0 = np.zeros((6, 6), dtype=complex)
    rho0[1, 1] = 1
    t = np.linspace(0, 5, 11)
    p1 = [s.matrix[1, 1].real for s in evolve(K, rho0, t)]
    np.testing.assert_allclose(p1, np.exp(-gamma * t), atol=1e-10)


def test_mean_field_rate():
    gamma = 0.3
    N = 30
    rep = make_fock_rep(N)
    K = build_K(rep, MMEParams(1.0, gamma, 1.0))
    alpha = 0.5
    coh = np.exp(-abs(alpha) ** 2 / 2) * np.array([alpha ** n / math.sqrt(math.factorial(n)) for n in range(N)])
    t = np.linspace(0, 4, 9)
    mean = [np.trace(rep.a @ s.matrix) for s in evolve(K, np.outer(coh, coh.conj()), t)]
    assert abs(extract_decay_rate(t, mean) - complex(-gamma / 2, -1.0)) < 1e-6


def test_stationary_invariance():
    K = build_K(make_fock_rep(20), MMEParams(1.0, 0.2, 1.0))
    rho = thermal_state(1.0, 20)
    out = evolve(K, rho, [0.0, 3.0, 6.0])
    assert np.abs(out[-1].matrix - rho).max() < 1e-6


def test_evolve_rejects_bad_inputs():
    K = build_K(make_fock_rep(4), MMEParams(1.0, 0.2, 1.0))
    with pytest.raises(ShapeError):
        evolve(K, np.eye(3), [0.0])
    with pytest.raises(ValueError):
        evolve(K, np.eye(4) / 4, [1.0, 0.5])


def test_extract_decay_rate():
    t = np.linspace(0, 2, 20)
    s = complex(-0.3, 2.0)
    assert extract_decay_rate(t, 1.7 * np.exp(s * t)) == pytest.approx(s)
    with pytest.raises(ShapeError):
        extract_decay_rate(t, t[:-1])
    with pytest.raises(NumericError):
        extract_decay_rate([0, 1], [1, 0])
