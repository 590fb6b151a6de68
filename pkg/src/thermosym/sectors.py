"""Large-dimension routes for the rotating-wave generator and the thermal rotation.

Both ``K`` and ``G`` conserve ``d = m - n`` on ``|m><n|``, so in the sector
``d >= 0`` with basis ``|j + d><j|`` they are tridiagonal.  The sector
spectrum follows from a real symmetric tridiagonal eigenproblem.

For generators without that structure (Caldeira-Leggett, generalized
Markovian), interior residuals are computed with sparse matrices and
``expm_multiply`` acting only on the window basis vectors.  This reaches
dimensions far beyond what dense ``N^2 x N^2`` matrices allow, which is what
it takes to push truncation errors below roundoff.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import expm_multiply

from .errors import InvalidDimensionError, TruncationWindowError
from .fock import window_indices
from .superops import MMEParams, compute_gamma_coefficient, temperature_from_b


def _check_sector(dim: int, d: int) -> int:
    if dim < 2:
        raise InvalidDimensionError(f"dimension must be >= 2, got {dim}")
    if not 0 <= d < dim:
        raise ValueError(f"sector {d} outside 0..{dim - 1}")
    return dim - d


def _aad(k: np.ndarray, dim: int) -> np.ndarray:
    """Diagonal of the truncated ``a a_dag``: ``k + 1`` except 0 on the top level."""
    return np.where(k < dim - 1, k + 1.0, 0.0)


def sector_K(dim: int, d: int, params: MMEParams) -> np.ndarray:
    """Block of ``K`` on ``span{|j+d><j|}``, ``d >= 0``."""
    size = _check_sector(dim, d)
    c1, c2 = params.c1, params.c2
    j = np.arange(size, dtype=float)
    out = np.diag(-c1 * (2 * j + d) - c2 * (_aad(j + d, dim) + _aad(j, dim)) - 1j * params.omega0 * d)
    jj = j[1:]
    # 2 c1 a rho a_dag lowers both indices, 2 c2 a_dag rho a raises them
    out[np.arange(size - 1), np.arange(1, size)] += 2 * c1 * np.sqrt((jj + d) * jj)
    out[np.arange(1, size), np.arange(size - 1)] += 2 * c2 * np.sqrt((jj + d) * jj)
    return out


def sector_G(dim: int, d: int) -> np.ndarray:
    """Block of ``G = i(A At - A_dag At_dag)`` on the same sector."""
    size = _check_sector(dim, d)
    jj = np.arange(1, size, dtype=float)
    off = np.sqrt((jj + d) * jj)
    out = np.zeros((size, size), dtype=complex)
    out[np.arange(size - 1), np.arange(1, size)] = 1j * off
    out[np.arange(1, size), np.arange(size - 1)] = -1j * off
    return out


def sector_rates(dim: int, d: int, params: MMEParams) -> np.ndarray:
    """Real parts of the eigenvalues of ``K`` in sector ``d``, descending.

    The off-diagonal products are ``4 c1 c2 j (j + d) >= 0``, so the block is
    diagonally similar to a real symmetric tridiagonal matrix.
    """
    size = _check_sector(dim, d)
    c1, c2 = params.c1, params.c2
    j = np.arange(size, dtype=float)
    diag = -c1 * (2 * j + d) - c2 * (_aad(j + d, dim) + _aad(j, dim))
    if size == 1:
        return diag
    jj = j[1:]
    off = 2 * math.sqrt(c1 * c2) * np.sqrt((jj + d) * jj)
    return linalg.eigh_tridiagonal(diag, off, eigvals_only=True)[::-1]


def sector_eigenvalues(dim: int, params: MMEParams, max_d: int) -> np.ndarray:
    """All eigenvalues of ``iK`` in sectors ``|d| <= max_d``.

    Sector ``-d`` is the complex conjugate of sector ``d``.
    """
    out = []
    for d in range(min(max_d, dim - 1) + 1):
        lam = sector_rates(dim, d, params)
        out.append(d * params.omega0 + 1j * lam)
        if d > 0:
            out.append(-d * params.omega0 + 1j * lam)
    return np.concatenate(out)


# -- sparse Liouville-space route -------------------------------------------

def _ladder(dim: int) -> sparse.csr_matrix:
    return sparse.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, format="csr", dtype=complex)


def _left(x):
    return sparse.kron(sparse.identity(x.shape[0], format="csr"), x, format="csr")


def _right(y):
    return sparse.kron(y.T, sparse.identity(y.shape[0], format="csr"), format="csr")


@dataclass(frozen=True)
class SparseOps:
    dim: int
    a: sparse.csr_matrix

    @classmethod
    def build(cls, dim: int) -> "SparseOps":
        if dim < 2:
            raise InvalidDimensionError(f"dimension must be >= 2, got {dim}")
        return cls(dim, _ladder(dim))

    @property
    def ad(self):
        return self.a.conj().T.tocsr()

    def G(self):
        return 1j * (_left(self.a) @ _right(self.ad) - _left(self.ad) @ _right(self.a))

    def K0(self, omega0):
        num = self.ad @ self.a
        return -1j * omega0 * (_left(num) - _right(num))

    def K_mme(self, params: MMEParams):
        a, ad = self.a, self.ad
        ada, aad = ad @ a, a @ ad
        d1 = 2 * _left(a) @ _right(ad) - _left(ada) - _right(ada)
        d2 = 2 * _left(ad) @ _right(a) - _left(aad) - _right(aad)
        return self.K0(params.omega0) + params.c1 * d1 + params.c2 * d2

    def _coords(self):
        x = (self.a + self.ad) / math.sqrt(2)
        ip = (self.a - self.ad) / math.sqrt(2)
        return _left(x), _right(x), _left(ip), _right(-ip)

    def K_cl(self, omega0, gamma1, b_cl):
        x, xt, dx, dxt = self._coords()
        u, dm = x - xt, dx - dxt
        return self.K0(omega0) - gamma1 * u @ dm - gamma1 * b_cl * u @ u

    def K_hpz(self, omega0, gamma2, b, Gamma):
        x, xt, dx, dxt = self._coords()
        u, dm, dp = x - xt, dx - dxt, dx + dxt
        return self.K0(omega0) - gamma2 * u @ dm - 2 * gamma2 * b * u @ u + 1j * Gamma * u @ dp


def sparse_generator(model: str, ops: SparseOps, b: float, **kw):
    """Sparse generator for ``model`` in {"mme", "cl", "hpz"} at thermal coefficient ``b``.

    For "hpz", ``Gamma`` is either passed directly or recomputed from
    ``ohmic=(eta, cutoff)`` at the temperature implied by ``b``.
    """
    omega0 = kw.get("omega0", 1.0)
    if model == "mme":
        return ops.K_mme(MMEParams(omega0, kw["gamma"], b))
    if model == "cl":
        return ops.K_cl(omega0, kw["gamma1"], b)
    if model == "hpz":
        Gamma = kw.get("Gamma")
        if Gamma is None:
            eta, cutoff = kw["ohmic"]
            Gamma = compute_gamma_coefficient(eta, cutoff, omega0, temperature_from_b(b, omega0))
        return ops.K_hpz(omega0, kw["gamma2"], b, Gamma)
    raise ValueError(f"unknown model {model!r}")


@dataclass(frozen=True)
class SparseSymmetryResult:
    residual: float
    action_residual: float
    theta: float
    dim: int
    window: int


def sparse_symmetry_check(model: str, b: float, b_prime: float, dim: int, window: int, **kw) -> SparseSymmetryResult:
    """Interior residual ``|P(U K(b) U^dag - K(b'))P| / |P K(b') P|`` without forming ``U``.

    ``P U X U^dag P = V^dag X V`` with ``V = U^dag P = exp(-i G theta) P``.
    """
    if not 0 <= window < dim:
        raise TruncationWindowError(f"window {window} outside 0..{dim - 1}")
    ops = SparseOps.build(dim)
    theta = 0.5 * math.log(b_prime / b)
    idx = window_indices(dim, window)
    P = np.zeros((dim * dim, idx.size), dtype=complex)
    P[idx, np.arange(idx.size)] = 1.0
    V = expm_multiply(-1j * theta * ops.G().tocsc(), P)
    K, Kp = sparse_generator(model, ops, b, **kw), sparse_generator(model, ops, b_prime, **kw)
    target = (Kp @ P)[idx]
    resid = np.linalg.norm(V.conj().T @ (K @ V) - target) / np.linalg.norm(target)
    A, At_dag = _left(ops.a), _right(ops.a)
    bog = math.cosh(theta) * (A @ P)[idx] - math.sinh(theta) * (At_dag @ P)[idx]
    action = np.linalg.norm(V.conj().T @ (A @ V) - bog)
    return SparseSymmetryResult(float(resid), float(action), theta, dim, window)
