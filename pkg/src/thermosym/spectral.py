"""Eigenvalues of the collision operator ``C = iK``, stationary states and evolution.

The rotating-wave generator has eigenvalues::

    z_mn^(+/-) = +/- n omega0 - i (m - n/2) gamma,    m >= n >= 0

independent of ``b``.  For ``n = 0`` both signs coincide and the mode is
counted once.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import linalg

from .errors import AmbiguityError, NumericError, ShapeError
from .fock import DensityState, FockRep, SuperOp, devectorize, make_fock_rep, vectorize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PredictedMode:
    m: int
    n: int
    sign: int
    z: complex


def predicted_zmn(m: int, n: int, sign: int, omega0: float, gamma: float) -> complex:
    """``sign * n * omega0 - i (m - n/2) gamma``."""
    if m < 0 or n < 0 or int(m) != m or int(n) != n:
        raise ValueError(f"(m, n) must be non-negative integers, got ({m}, {n})")
    if m < n:
        raise ValueError(f"m must be >= n, got m={m}, n={n}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return complex(sign * n * omega0, -(m - n / 2) * gamma)


def predicted_spectrum(omega0: float, gamma: float, max_order: int) -> list[PredictedMode]:
    """All modes with ``m + n <= max_order``; ``n = 0`` carries a single sign."""
    modes = []
    for n in range(max_order // 2 + 1):
        for m in range(n, max_order - n + 1):
            for sign in ((1,) if n == 0 else (1, -1)):
                modes.append(PredictedMode(m, n, sign, predicted_zmn(m, n, sign, omega0, gamma)))
    return modes


def eigen_spectrum(K) -> np.ndarray:
    """Eigenvalues of ``iK``."""
    mat = K.matrix if isinstance(K, SuperOp) else np.asarray(K)
    if not np.all(np.isfinite(mat)):
        raise NumericError("generator has non-finite entries")
    try:
        return linalg.eigvals(1j * mat)
    except linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc


@dataclass(frozen=True)
class ModeMatch:
    mode: PredictedMode
    computed: complex
    delta: float
    collision: bool = False


@dataclass(frozen=True)
class SpectrumReport:
    computed: np.ndarray = field(repr=False)
    predicted: list
    matches: list
    tolerance: float
    max_order: int

    @property
    def failures(self) -> list[ModeMatch]:
        return [mm for mm in self.matches if not mm.delta <= self.tolerance]

    @property
    def max_delta(self) -> float:
        return max((mm.delta for mm in self.matches), default=0.0)

    @property
    def passed(self) -> bool:
        return not self.failures


def match_spectrum(
    computed: Sequence[complex],
    omega0: float,
    gamma: float,
    max_order: int,
    tol: float | None = None,
) -> SpectrumReport:
    """Greedy nearest-neighbour matching of predictions to computed eigenvalues.

    Predictions are processed in order of their best distance; each computed
    eigenvalue is used at most once.  A prediction whose nearest eigenvalue
    was already claimed is matched to the next nearest and flagged as a
    collision; it only counts as a failure if that match is outside ``tol``
    (exact degeneracies, e.g. at ``gamma = 0``, collide harmlessly).
    """
    computed = np.asarray(computed, dtype=complex)
    if tol is None:
        tol = 1e-6 * (omega0 + gamma)
    predicted = predicted_spectrum(omega0, gamma, max_order)
    dist = np.abs(computed[None, :] - np.array([p.z for p in predicted])[:, None])
    order = np.argsort(dist.min(axis=1), kind="stable")
    used = np.zeros(computed.size, dtype=bool)
    found = {}
    for i in order:
        ranked = np.argsort(dist[i], kind="stable")
        free = ranked[~used[ranked]]
        if free.size == 0:
            found[i] = ModeMatch(predicted[i], complex("nan"), float("inf"), True)
            continue
        j = free[0]
        used[j] = True
        found[i] = ModeMatch(predicted[i], complex(computed[j]), float(dist[i, j]), bool(j != ranked[0]))
    matches = [found[i] for i in range(len(predicted))]
    return SpectrumReport(computed, predicted, matches, tol, max_order)


def trusted_order(dim: int) -> int:
    """Default trusted window ``m + n <= N/2 - 2``."""
    return max(dim // 2 - 2, 0)


def degeneracy_across_b(
    builder: Callable[[FockRep, float], SuperOp],
    b_list: Sequence[float],
    dim: int,
    omega0: float,
    gamma: float,
    max_order: int | None = None,
) -> float:
    """Largest distance between trusted-window spectra computed at each ``b``.

    For each ``b`` the trusted-window spectrum is the set of eigenvalues
    matched to the predicted modes; spectra are compared mode by mode.
    """
    if max_order is None:
        max_order = trusted_order(dim)
    rep = make_fock_rep(dim)
    spectra = []
    for b in b_list:
        rpt = match_spectrum(eigen_spectrum(builder(rep, b)), omega0, gamma, max_order)
        spectra.append(np.array([mm.computed for mm in rpt.matches]))
    worst = 0.0
    for i in range(len(spectra)):
        for j in range(i + 1, len(spectra)):
            worst = max(worst, float(np.max(np.abs(spectra[i] - spectra[j]))))
    return worst


def stationary_state(K: SuperOp, zero_tol: float = 1e-9, edge_tol: float = 1e-6) -> DensityState:
    """Trace-normalized right null vector of ``K``.

    When several eigenvalues are numerically zero, modes carrying weight
    ``>= edge_tol`` on the two highest Fock levels are discarded as
    truncation artefacts; if more than one survives the result is ambiguous.
    """
    mat = K.matrix
    scale = max(1.0, float(np.linalg.norm(mat, 1)))
    w, V = linalg.eig(mat)
    cand = np.flatnonzero(np.abs(w) <= zero_tol * scale)
    if cand.size == 0:
        raise NumericError(f"no zero mode: smallest |eigenvalue| is {np.abs(w).min():.3g}")
    dim = K.dim
    if cand.size > 1:
        kept = []
        for c in cand:
            rho = devectorize(V[:, c])
            edge = np.abs(rho[dim - 2:, :]).sum() + np.abs(rho[:, dim - 2:]).sum()
            if edge < edge_tol * np.abs(rho).sum():
                kept.append(c)
        if len(kept) != 1:
            raise AmbiguityError(f"{cand.size} zero modes, {len(kept)} survive the truncation-edge filter")
        cand = np.array(kept)
    rho = devectorize(V[:, cand[0]])
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise NumericError("zero mode is traceless")
    rho = rho / tr
    return DensityState(0.5 * (rho + rho.conj().T))


def thermal_populations(b: float, dim: int) -> np.ndarray:
    """Truncated geometric distribution ``p_n ~ (nbar/(nbar+1))^n`` with ``nbar = b - 1/2``."""
    nbar = b - 0.5
    ratio = nbar / (nbar + 1)
    p = ratio ** np.arange(dim, dtype=float)
    return p / p.sum()


def thermal_state(b: float, dim: int) -> np.ndarray:
    return np.diag(thermal_populations(b, dim)).astype(complex)


def evolve(K: SuperOp, rho0, t_grid: Sequence[float], trace_tol: float = 1e-8) -> list[DensityState]:
    """``rho(t) = exp(K t) rho0`` on an increasing time grid.

    Propagators ``exp(K dt)`` are cached per distinct step.
    """
    mat0 = rho0.matrix if isinstance(rho0, DensityState) else np.asarray(rho0, dtype=complex)
    if mat0.shape != (K.dim, K.dim):
        raise ShapeError(f"state of shape {mat0.shape} does not match dim {K.dim}")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or np.any(np.diff(t) < 0):
        raise ValueError("t_grid must be a non-empty increasing sequence")
    cache: dict[float, np.ndarray] = {}
    vec = vectorize(mat0)
    tr0 = np.trace(mat0)
    out = []
    prev = 0.0
    for ti in t:
        dt = float(ti - prev)
        if dt != 0.0:
            key = round(dt, 12)
            if key not in cache:
                cache[key] = linalg.expm(K.matrix * dt)
            vec = cache[key] @ vec
        prev = ti
        rho = devectorize(vec)
        drift = abs(np.trace(rho) - tr0)
        if drift > trace_tol:
            raise NumericError(f"trace drifted by {drift:.3g} at t={ti:g}")
        out.append(DensityState(rho))
    return out


def extract_decay_rate(t: Sequence[float], series: Sequence[complex]) -> complex:
    """Fit ``series ~ c exp(s t)`` and return ``s``.

    ``Re s`` comes from a linear fit of ``log|series|`` and ``Im s`` from a
    linear fit of the unwrapped phase.
    """
    t = np.asarray(t, dtype=float)
    series = np.asarray(series, dtype=complex)
    if t.shape != series.shape or t.size < 2:
        raise ShapeError("need matching time and value arrays with at least two points")
    if np.any(series == 0):
        raise NumericError("series vanishes; cannot take logarithms")
    re = np.polyfit(t, np.log(np.abs(series)), 1)[0]
    im = np.polyfit(t, np.unwrap(np.angle(series)), 1)[0]
    return complex(re, im)
