import math

import numpy as np
import pytest

from thermosym.errors import InvalidDimensionError, TruncationWindowError
from thermosym.fock import make_fock_rep
from thermosym.sectors import (
    SparseOps,
    sector_G,
    sector_K,
    sector_eigenvalues,
    sector_rates,
    sparse_generator,
    sparse_symmetry_check,
)
from thermosym.superops import MMEParams, build_CL, build_HPZ, build_K, HPZParams
from thermosym.symmetry import cl_builder, generator_G, mme_builder, symmetry_check
from thermosym.spectral import eigen_spectrum, match_spectrum


def _block(mat, dim, d):
    j = np.arange(dim - d)
    idx = (j + d) + dim * j
    return mat[np.ix_(idx, idx)]


@pytest.mark.parametrize("d", [0, 1, 3])
def test_sector_blocks_match_dense(d):
    N = 9
    params = MMEParams(1.0, 0.3, 1.4)
    K = build_K(make_fock_rep(N), params).matrix
    np.testing.assert_allclose(sector_K(N, d, params), _block(K, N, d), atol=1e-14)
    np.testing.assert_allclose(sector_G(N, d), _block(generator_G(make_fock_rep(N)), N, d), atol=1e-14)


def test_sector_rates_match_block_eigenvalues():
    params = MMEParams(1.0, 0.3, 1.4)
    for d in (0, 2):
        ev = np.linalg.eigvals(sector_K(10, d, params))
        np.testing.assert_allclose(np.sort(ev.real)[::-1], sector_rates(10, d, params), atol=1e-10)
        np.testing.assert_allclose(ev.imag, -d, atol=1e-10)


def test_sector_eigenvalues_cover_dense_spectrum():
    N = 7
    params = MMEParams(1.0, 0.3, 1.4)
    dense = eigen_spectrum(build_K(make_fock_rep(N), params))
    sect = sector_eigenvalues(N, params, N - 1)
    assert sect.size == dense.size
    assert max(np.abs(dense - z).min() for z in sect) < 1e-9


def test_converged_sector_spectrum():
    # the lowest rates of a large truncation reproduce -(m - n/2) gamma
    gamma = 0.2
    params = MMEParams(1.0, gamma, 3.0)
    rpt = match_spectrum(sector_eigenvalues(400, params, 6), 1.0, gamma, 6, tol=1e-8)
    assert rpt.passed, rpt.max_delta


def test_sector_bounds():
    with pytest.raises(InvalidDimensionError):
        sector_K(1, 0, MMEParams(1, 0.1, 1))
    with pytest.raises(ValueError):
        sector_G(5, 5)


@pytest.mark.parametrize(
    "model, kw, dense",
    [
        ("mme", {"gamma": 0.2}, lambda rep, b: build_K(rep, MMEParams(1.0, 0.2, b))),
        ("cl", {"gamma1": 0.2}, lambda rep, b: build_CL(rep, 1.0, 0.2, b)),
        ("hpz", {"gamma2": 0.2, "Gamma": 0.04}, lambda rep, b: build_HPZ(rep, HPZParams(1.0, 0.2, b, Gamma=0.04))),
    ],
)
def test_sparse_generators_match_dense(model, kw, dense):
    rep = make_fock_rep(8)
    sp = sparse_generator(model, SparseOps.build(8), 1.3, **kw).toarray()
    np.testing.assert_allclose(sp, dense(rep, 1.3).matrix, atol=1e-13)


def test_sparse_residual_matches_dense():
    b, bp = 1.0, math.exp(0.6)
    dense = symmetry_check(mme_builder(1.0, 0.2), b, bp, 16, 4, enforce_budget=False)
    sp = sparse_symmetry_check("mme", b, bp, 16, 4, gamma=0.2)
    assert sp.residual == pytest.approx(dense.residual, rel=1e-8, abs=1e-13)
    dense = symmetry_check(cl_builder(1.0, 0.2), b, 2.0, 16, 4, enforce_budget=False)
    sp = sparse_symmetry_check("cl", b, 2.0, 16, 4, gamma1=0.2)
    assert sp.residual == pytest.approx(dense.residual, rel=1e-8, abs=1e-13)


def test_sparse_converged_similarity():
    res = sparse_symmetry_check("mme", 1.0, 2.0, 60, 6, gamma=0.2)
    assert res.residual < 1e-10
    assert res.action_residual < 1e-10


def test_sparse_window_bounds():
    with pytest.raises(TruncationWindowError):
        sparse_symmetry_check("mme", 1.0, 2.0, 10, 10, gamma=0.2)


def test_sparse_unknown_model():
    with pytest.raises(ValueError):
        sparse_generator("lindblad", SparseOps.build(4), 1.0)
