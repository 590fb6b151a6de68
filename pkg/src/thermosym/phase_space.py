"""Phase-space picture: equilibrium Gaussians, thermal scalings and a Wigner-function solver.

Coordinates: ``Q = (x + x~)/2`` and ``r = x - x~`` for the density matrix
``rho(x, x~)``; ``(Q, P)`` for the Wigner function, with ``Q`` and ``P``
corresponding to ``x_hat`` and ``p_hat``.

The Wigner equation of the rotating-wave master equation is written in flux
form ``dW/dt = -div F`` with::

    F_Q =  omega0 P W - (gamma/2) Q W - (b gamma/2) dW/dQ
    F_P = -omega0 Q W - (gamma/2) P W - (b gamma/2) dW/dP

Damping and diffusion use Scharfetter-Gummel fluxes, which are exact for
the one-dimensional Ornstein-Uhlenbeck steady state on any grid and fall
back smoothly to upwinding at large cell Peclet number.  Rotation uses
central fluxes (optionally first-order upwind).  Time stepping is the
three-stage strong-stability-preserving Runge-Kutta method.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import StepSizeError, UnphysicalParameterError, UnsupportedStateError
from .fock import make_fock_rep


def _check_b(b: float) -> None:
    if not np.isfinite(b) or b < 0.5:
        raise UnphysicalParameterError(f"thermal parameter b must be finite and >= 1/2, got {b}")


# -- equilibrium Gaussian -----------------------------------------------------

@dataclass(frozen=True)
class GaussianQr:
    """``rho(Q, r) = (2 pi b)^(-1/2) exp(-Q^2/(2b) - b r^2/2)``."""

    b: float

    def __post_init__(self):
        _check_b(self.b)

    @property
    def normalization(self) -> float:
        return 1.0 / math.sqrt(2 * math.pi * self.b)

    def __call__(self, Q, r):
        Q, r = np.asarray(Q, dtype=float), np.asarray(r, dtype=float)
        return self.normalization * np.exp(-Q**2 / (2 * self.b) - self.b * r**2 / 2)


def equilibrium_gaussian(b: float) -> GaussianQr:
    return GaussianQr(b)


def _dispersion(f, half_width: float) -> float:
    kw = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    norm = integrate.quad(f, -half_width, half_width, **kw)[0]
    mean = integrate.quad(lambda s: s * f(s), -half_width, half_width, **kw)[0] / norm
    second = integrate.quad(lambda s: (s - mean) ** 2 * f(s), -half_width, half_width, **kw)[0] / norm
    return math.sqrt(second)


def dispersions(g: GaussianQr) -> tuple[float, float]:
    """``(Delta Q along r = 0, Delta r along Q = 0)`` by quadrature."""
    sb = math.sqrt(g.b)
    dQ = _dispersion(lambda q: float(g(q, 0.0)), 20 * sb)
    dr = _dispersion(lambda r: float(g(0.0, r)), 20 / sb)
    return dQ, dr


def thermal_map_dispersions(g: GaussianQr, theta: float) -> tuple[float, float]:
    """Dispersions after the thermal map: ``(e^theta Delta Q, e^-theta Delta r)``."""
    if theta < -0.5 * math.log(2 * g.b) - 1e-15:
        raise UnphysicalParameterError(
            f"theta={theta} is below the physical bound {-0.5 * math.log(2 * g.b)} for b={g.b}"
        )
    dQ, dr = dispersions(g)
    return math.exp(theta) * dQ, math.exp(-theta) * dr


def transformed_gaussian(g: GaussianQr, theta: float):
    """Density carried by the thermal map, ``rho'(Q, r) = rho(e^-theta Q, e^theta r) e^-theta``."""
    return lambda Q, r: math.exp(-theta) * g(np.exp(-theta) * np.asarray(Q), np.exp(theta) * np.asarray(r))


# -- scalings, velocity, action-angle ---------------------------------------

def scale_Qr(Q, r, theta: float):
    return np.exp(-theta) * np.asarray(Q), np.exp(theta) * np.asarray(r)


def scale_PQ(P, Q, theta: float):
    f = np.exp(-theta)
    return f * np.asarray(P), f * np.asarray(Q)


def theta_from_zero_temperature(b: float) -> float:
    """Angle of the thermal map from ``b = 1/2`` to ``b``."""
    _check_b(b)
    return 0.5 * math.log(2 * b)


def velocity_from_theta(theta: float) -> float:
    return math.tanh(theta)


def velocity_from_b(b: float) -> float:
    _check_b(b)
    return (b - 0.5) / (b + 0.5)


def velocity_from_beta(hbar_omega_beta: float) -> float:
    """``exp(-hbar omega0 beta)``; ``hbar_omega_beta = inf`` is zero temperature."""
    if hbar_omega_beta <= 0:
        raise UnphysicalParameterError("hbar*omega0*beta must be positive")
    return math.exp(-hbar_omega_beta)


def velocity_param(b: float) -> float:
    return velocity_from_b(b)


def velocity_addition(v1: float, v2: float) -> float:
    return (v1 + v2) / (1 + v1 * v2)


def action_angle(Q, P):
    """``J = (Q^2 + P^2)/2`` and ``alpha = atan2(P, Q)``."""
    Q, P = np.asarray(Q, dtype=float), np.asarray(P, dtype=float)
    return 0.5 * (Q**2 + P**2), np.arctan2(P, Q)


def action_angle_scale(J, alpha, theta: float):
    J = np.asarray(J, dtype=float)
    if np.any(J < 0):
        raise ValueError("action must be non-negative")
    return np.exp(-2 * theta) * J, alpha


# -- Fokker-Planck grid solver -----------------------------------------------

def _bernoulli(x: np.ndarray) -> np.ndarray:
    """``x / (exp(x) - 1)`` with the removable point at 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-8
    out[small] = 1.0 - x[small] / 2
    xs = x[~small]
    out[~small] = xs / np.expm1(xs)
    return out


@dataclass(frozen=True)
class FPGrid:
    """Cell-centred grid on ``[-Q_half, Q_half] x [-P_half, P_half]`` with field ``W[iQ, iP]``."""

    Q_half: float
    P_half: float
    nQ: int
    nP: int
    W: np.ndarray = field(repr=False)
    t: float = 0.0

    def __post_init__(self):
        if self.nQ < 3 or self.nP < 3:
            raise ValueError("grid needs at least 3 cells per direction")
        W = np.asarray(self.W, dtype=float)
        if W.shape != (self.nQ, self.nP):
            raise ValueError(f"field shape {W.shape} does not match ({self.nQ}, {self.nP})")
        object.__setattr__(self, "W", W)

    @classmethod
    def from_function(cls, f, Q_half: float, n: int, P_half: float | None = None, nP: int | None = None) -> "FPGrid":
        P_half = Q_half if P_half is None else P_half
        nP = n if nP is None else nP
        g = cls(Q_half, P_half, n, nP, np.zeros((n, nP)))
        QQ, PP = np.meshgrid(g.Q, g.P, indexing="ij")
        return replace(g, W=np.asarray(f(QQ, PP), dtype=float))

    @property
    def hQ(self) -> float:
        return 2 * self.Q_half / self.nQ

    @property
    def hP(self) -> float:
        return 2 * self.P_half / self.nP

    @property
    def Q(self) -> np.ndarray:
        return -self.Q_half + self.hQ * (np.arange(self.nQ) + 0.5)

    @property
    def P(self) -> np.ndarray:
        return -self.P_half + self.hP * (np.arange(self.nP) + 0.5)

    def moments(self) -> dict:
        w = self.W * self.hQ * self.hP
        mass = w.sum()
        Q, P = self.Q[:, None], self.P[None, :]
        mQ = (Q * w).sum() / mass
        mP = (P * w).sum() / mass
        return {
            "mass": float(mass),
            "Q": float(mQ),
            "P": float(mP),
            "Q2": float((Q**2 * w).sum() / mass),
            "P2": float((P**2 * w).sum() / mass),
            "QP": float((Q * P * w).sum() / mass),
        }

    def to_csv(self, path) -> Path:
        path = Path(path)
        QQ, PP = np.meshgrid(self.Q, self.P, indexing="ij")
        with path.open("w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["Q", "P", "W"])
            for row in zip(QQ.ravel(), PP.ravel(), self.W.ravel()):
                wr.writerow([repr(float(v)) for v in row])
        return path


def gaussian_wigner(mean=(0.0, 0.0), cov=((0.5, 0.0), (0.0, 0.5))):
    """Normalized Gaussian ``W(Q, P)`` with the given mean and covariance."""
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    inv = np.linalg.inv(cov)
    norm = 1.0 / (2 * math.pi * math.sqrt(np.linalg.det(cov)))

    def f(Q, P):
        dq, dp = Q - mean[0], P - mean[1]
        quad = inv[0, 0] * dq**2 + 2 * inv[0, 1] * dq * dp + inv[1, 1] * dp**2
        return norm * np.exp(-0.5 * quad)

    return f


@dataclass(frozen=True)
class FPOperator:
    """Discretized Wigner generator on a fixed grid geometry."""

    omega0: float
    gamma: float
    b: float
    grid: FPGrid = field(repr=False)
    rotation: str = "central"

    @property
    def dt_max(self) -> float:
        g = self.grid
        h = min(g.hQ, g.hP)
        L = max(g.Q_half, g.P_half)
        bounds = [h / ((self.omega0 + 0.5 * self.gamma) * L)]
        if self.gamma > 0:
            bounds.append(h * h / (self.b * self.gamma))
        return 0.4 * min(bounds)

    def _axis_flux(self, W, coord_face, h, cross, rot_sign):
        """Fluxes through interior faces along axis 0 of ``W``.

        ``coord_face``: own coordinate at faces; ``cross``: the other
        coordinate (broadcast along axis 1).
        """
        D = 0.5 * self.b * self.gamma
        left, right = W[:-1], W[1:]
        if D > 0:
            pe = (-0.5 * self.gamma * coord_face * h / D)[:, None]
            flux = (D / h) * (_bernoulli(-pe) * left - _bernoulli(pe) * right)
        else:
            flux = -0.5 * self.gamma * coord_face[:, None] * 0.5 * (left + right)
        vel = rot_sign * self.omega0 * cross[None, :]
        if self.rotation == "upwind":
            flux = flux + np.where(vel > 0, vel * left, vel * right)
        else:
            flux = flux + vel * 0.5 * (left + right)
        return flux

    def rhs(self, W: np.ndarray) -> np.ndarray:
        g = self.grid
        Qf = -g.Q_half + g.hQ * np.arange(1, g.nQ)
        Pf = -g.P_half + g.hP * np.arange(1, g.nP)
        out = np.zeros_like(W)
        fQ = self._axis_flux(W, Qf, g.hQ, g.P, +1.0)
        out[:-1] -= fQ / g.hQ
        out[1:] += fQ / g.hQ
        fP = self._axis_flux(W.T, Pf, g.hP, g.Q, -1.0).T
        out[:, :-1] -= fP / g.hP
        out[:, 1:] += fP / g.hP
        return out


def fp_build(omega0: float, gamma: float, b: float, grid: FPGrid, rotation: str = "central", check_resolution: bool = True) -> FPOperator:
    if omega0 < 0 or gamma < 0:
        raise UnphysicalParameterError("omega0 and gamma must be non-negative")
    _check_b(b)
    if rotation not in ("central", "upwind"):
        raise ValueError(f"rotation must be 'central' or 'upwind', got {rotation!r}")
    if check_resolution and max(grid.hQ, grid.hP) > math.sqrt(b) / 8:
        raise ValueError(
            f"grid spacing {max(grid.hQ, grid.hP):.3g} does not resolve sqrt(b)={math.sqrt(b):.3g} with 8 cells"
        )
    return FPOperator(omega0, gamma, b, grid, rotation)


def fp_step(op: FPOperator, grid: FPGrid, dt: float) -> FPGrid:
    """One SSP-RK3 step."""
    if dt > op.dt_max * (1 + 1e-12):
        raise StepSizeError(f"dt={dt:.3g} exceeds the stability bound {op.dt_max:.3g}")
    W = grid.W
    w1 = W + dt * op.rhs(W)
    w2 = 0.75 * W + 0.25 * (w1 + dt * op.rhs(w1))
    w3 = W / 3 + 2.0 / 3.0 * (w2 + dt * op.rhs(w2))
    return replace(grid, W=w3, t=grid.t + dt)


@dataclass(frozen=True)
class FPRun:
    grid: FPGrid
    times: np.ndarray
    series: list

    def to_csv(self, path) -> Path:
        path = Path(path)
        cols = ["t", "Q", "P", "Q2", "P2", "mass"]
        with path.open("w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "<Q>", "<P>", "<Q^2>", "<P^2>", "mass"])
            for t, m in zip(self.times, self.series):
                wr.writerow([repr(float(t))] + [repr(m[c]) for c in cols[1:]])
        return path


def fp_run(op: FPOperator, grid: FPGrid, t_final: float | None = None, t_grid: Sequence[float] | None = None) -> FPRun:
    """Integrate to ``t_final`` or through every time in ``t_grid``, recording moments."""
    if (t_final is None) == (t_grid is None):
        raise ValueError("give exactly one of t_final or t_grid")
    times = np.array([t_final] if t_grid is None else t_grid, dtype=float)
    if np.any(np.diff(times) < 0) or times[0] < grid.t:
        raise ValueError("times must be increasing and not before the grid time")
    series = []
    g = grid
    for target in times:
        span = target - g.t
        if span > 0:
            n = max(1, math.ceil(span / op.dt_max))
            dt = span / n
            for _ in range(n):
                g = fp_step(op, g, dt)
        series.append(g.moments())
    return FPRun(g, times, series)


def fp_scale_symmetry(
    omega0: float,
    gamma: float,
    b: float,
    theta: float,
    initial,
    Q_half: float,
    n: int,
    t_final: float,
) -> float:
    """L2 distance between a rescaled evolution and the evolution at ``b e^{2 theta}``.

    ``W`` is evolved with ``b``; its rescaling ``e^{-2 theta} W(e^{-theta} Q, e^{-theta} P)``
    is compared with the evolution at ``b' = b e^{2 theta}`` of the rescaled
    initial data, on the grid stretched by ``e^theta``.
    """
    s = math.exp(theta)
    g1 = FPGrid.from_function(initial, Q_half, n)
    g2 = FPGrid.from_function(lambda Q, P: initial(Q / s, P / s) / s**2, Q_half * s, n)
    op1 = fp_build(omega0, gamma, b, g1, check_resolution=False)
    op2 = fp_build(omega0, gamma, b * s * s, g2, check_resolution=False)
    # a common step keeps both runs on the same time levels
    steps = max(1, math.ceil(t_final / min(op1.dt_max, op2.dt_max)))
    dt = t_final / steps
    for _ in range(steps):
        g1 = fp_step(op1, g1, dt)
        g2 = fp_step(op2, g2, dt)
    diff = g2.W - g1.W / s**2
    return float(np.sqrt((diff**2).sum() * g2.hQ * g2.hP))


# -- cross-representation consistency ------------------------------------------

def fock_gaussian_moments(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Mean, symmetrized covariance of ``(x_hat, p_hat)`` and purity of ``rho``."""
    rep = make_fock_rep(rho.shape[0])
    x, p = rep.x_hat, rep.p_hat
    ev = lambda op: float(np.trace(op @ rho).real)  # noqa: E731
    mean = np.array([ev(x), ev(p)])
    sxx = ev(x @ x) - mean[0] ** 2
    spp = ev(p @ p) - mean[1] ** 2
    sxp = 0.5 * ev(x @ p + p @ x) - mean[0] * mean[1]
    purity = float(np.trace(rho @ rho).real)
    return mean, np.array([[sxx, sxp], [sxp, spp]]), purity


@dataclass(frozen=True)
class MomentComparison:
    times: np.ndarray
    fock: dict
    fp: dict
    max_discrepancy: float


def fp_vs_fock_moments(
    omega0: float,
    gamma: float,
    b: float,
    rho0: np.ndarray,
    t_grid: Sequence[float],
    n: int = 129,
    gaussian_tol: float = 1e-6,
) -> MomentComparison:
    """Compare first and second moments from the Wigner solver and the Fock evolution.

    ``rho0`` must be Gaussian: its purity has to equal ``1/(2 sqrt(det sigma))``.
    """
    from .spectral import evolve
    from .superops import MMEParams, build_K

    rho0 = np.asarray(rho0, dtype=complex)
    mean, cov, purity = fock_gaussian_moments(rho0)
    det = float(np.linalg.det(cov))
    if det <= 0 or abs(purity - 1.0 / (2 * math.sqrt(det))) > gaussian_tol:
        raise UnsupportedStateError(
            f"state is not Gaussian: purity {purity:.8g} vs Gaussian value "
            f"{1.0 / (2 * math.sqrt(max(det, 1e-300))):.8g}"
        )
    spread = math.sqrt(max(np.linalg.eigvalsh(cov).max(), b))
    half = 8 * spread + float(np.abs(mean).max())
    grid = FPGrid.from_function(gaussian_wigner(mean, cov), half, n)
    op = fp_build(omega0, gamma, b, grid, check_resolution=False)
    run = fp_run(op, grid, t_grid=t_grid)

    rep = make_fock_rep(rho0.shape[0])
    K = build_K(rep, MMEParams(omega0, gamma, b))
    states = evolve(K, rho0, t_grid)
    keys = ("Q", "P", "Q2", "P2")
    ops = (rep.x_hat, rep.p_hat, rep.x_hat @ rep.x_hat, rep.p_hat @ rep.p_hat)
    fock = {k: np.array([s.expect(o).real for s in states]) for k, o in zip(keys, ops)}
    fp = {k: np.array([m[k] for m in run.series]) for k in keys}
    worst = max(float(np.max(np.abs(fock[k] - fp[k]))) for k in keys)
    return MomentComparison(np.asarray(t_grid, dtype=float), fock, fp, worst)
