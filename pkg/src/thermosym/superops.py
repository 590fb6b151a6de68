"""Generators of the damped-oscillator dynamics as Liouville-space matrices.

Builders cover the rotating-wave master equation ``K = K0 + Kd``, the
squeezed-bath extension with ``K3`` terms, the Caldeira-Leggett generator
and the generalized (non rotating-wave) Markovian generator carrying the
``Gamma`` term.

Coordinate-space expressions are realized through a fixed dictionary
(see :class:`CoordinateOps`)::

    x      -> lift_left(x_hat)       x~      -> lift_right(x_hat)
    d/dx   -> lift_left(i p_hat)     d/dx~   -> lift_right(-i p_hat)

which follows from ``<x|p rho|x~> = -i d_x rho(x, x~)`` and
``<x|rho p|x~> = +i d_x~ rho(x, x~)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .errors import NumericError, UnphysicalParameterError
from .fock import FockRep, SuperOp, doubled_ops, left, right


# -- thermal coefficients ---------------------------------------------------

def b_tilde(omega, T: float, hbar: float = 1.0, k_B: float = 1.0):
    """``1/2 coth(hbar omega / 2 k_B T)``; equals 1/2 at ``T = 0``."""
    omega = np.asarray(omega, dtype=float)
    if T < 0:
        raise UnphysicalParameterError(f"temperature must be >= 0, got {T}")
    if T == 0:
        out = np.full_like(omega, 0.5)
    else:
        out = 0.5 / np.tanh(hbar * omega / (2.0 * k_B * T))
    return out if out.ndim else float(out)


def thermal_b(T: float, omega0: float, hbar: float = 1.0, k_B: float = 1.0) -> float:
    """Thermal parameter ``b`` of a reservoir at temperature ``T``, resonant at ``omega0``."""
    if omega0 <= 0:
        raise UnphysicalParameterError(f"omega0 must be > 0, got {omega0}")
    return b_tilde(omega0, T, hbar, k_B)


def temperature_from_b(b: float, omega0: float, hbar: float = 1.0, k_B: float = 1.0) -> float:
    """Inverse of :func:`thermal_b`."""
    _check_b(b)
    if b == 0.5:
        return 0.0
    return hbar * omega0 / (2.0 * k_B * math.atanh(0.5 / b))


def _check_b(b: float) -> None:
    if not np.isfinite(b) or b < 0.5:
        raise UnphysicalParameterError(f"thermal parameter b must be finite and >= 1/2, got {b}")


@dataclass(frozen=True)
class ThermalParam:
    b: float

    def __post_init__(self):
        _check_b(self.b)

    @classmethod
    def from_temperature(cls, T, omega0, hbar=1.0, k_B=1.0) -> "ThermalParam":
        return cls(thermal_b(T, omega0, hbar, k_B))

    @property
    def mean_occupation(self) -> float:
        return self.b - 0.5


@dataclass(frozen=True)
class MMEParams:
    """Rotating-wave master-equation parameters."""

    omega0: float
    gamma: float
    b: float

    def __post_init__(self):
        if self.omega0 <= 0:
            raise UnphysicalParameterError(f"omega0 must be > 0, got {self.omega0}")
        if self.gamma < 0:
            raise UnphysicalParameterError(f"gamma must be >= 0, got {self.gamma}")
        _check_b(self.b)

    @property
    def c1(self) -> float:
        return 0.5 * self.gamma * (self.b + 0.5)

    @property
    def c2(self) -> float:
        return 0.5 * self.gamma * (self.b - 0.5)

    def as_dict(self) -> dict:
        return {"omega0": self.omega0, "gamma": self.gamma, "b": self.b}


@dataclass(frozen=True)
class OhmicSpectralDensity:
    """``I(omega) = eta * omega * exp(-omega / cutoff)``."""

    eta: float
    cutoff: float

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.eta * omega * np.exp(-omega / self.cutoff)


@dataclass(frozen=True)
class HPZParams:
    """Generalized Markovian generator parameters.

    ``Gamma`` may be given directly or computed from an Ohmic spectral
    density at the temperature implied by ``b``.
    """

    omega0: float
    gamma2: float
    b: float
    Gamma: Optional[float] = None
    ohmic: Optional[OhmicSpectralDensity] = None
    hbar: float = 1.0
    k_B: float = 1.0

    def __post_init__(self):
        if self.omega0 <= 0:
            raise UnphysicalParameterError(f"omega0 must be > 0, got {self.omega0}")
        _check_b(self.b)
        if (self.Gamma is None) == (self.ohmic is None):
            raise ValueError("give exactly one of Gamma or ohmic")

    @property
    def temperature(self) -> float:
        return temperature_from_b(self.b, self.omega0, self.hbar, self.k_B)

    @property
    def gamma_coefficient(self) -> float:
        if self.Gamma is not None:
            return float(self.Gamma)
        return compute_gamma_coefficient(
            self.ohmic.eta, self.ohmic.cutoff, self.omega0, self.temperature, self.hbar, self.k_B
        )

    def at_b(self, b: float) -> "HPZParams":
        """Same reservoir model at another thermal parameter.

        A direct ``Gamma`` is carried over unchanged; an Ohmic model is
        re-evaluated at the new temperature.
        """
        return HPZParams(self.omega0, self.gamma2, b, self.Gamma, self.ohmic, self.hbar, self.k_B)


# -- coordinate dictionary --------------------------------------------------

@dataclass(frozen=True)
class CoordinateOps:
    """Multiplication and derivative operators on ``rho(x, x~)``."""

    x: np.ndarray
    xt: np.ndarray
    dx: np.ndarray
    dxt: np.ndarray

    @classmethod
    def from_rep(cls, rep: FockRep) -> "CoordinateOps":
        return cls(
            x=left(rep.x_hat),
            xt=right(rep.x_hat),
            dx=left(1j * rep.p_hat),
            dxt=right(-1j * rep.p_hat),
        )

    @property
    def diff(self) -> np.ndarray:
        """``x - x~``"""
        return self.x - self.xt

    @property
    def total(self) -> np.ndarray:
        """``x + x~``"""
        return self.x + self.xt

    @property
    def d_plus(self) -> np.ndarray:
        return self.dx + self.dxt

    @property
    def d_minus(self) -> np.ndarray:
        return self.dx - self.dxt


# -- rotating-wave master equation -----------------------------------------

def build_K0(rep: FockRep, omega0: float) -> SuperOp:
    """Free evolution ``rho -> -i omega0 [a_dag a, rho]``."""
    num = rep.number
    mat = -1j * omega0 * (left(num) - right(num))
    return SuperOp(rep.dim, mat, params={"omega0": omega0})


def _dissipator_c(rep: FockRep, c1: float, c2: float) -> np.ndarray:
    a, ad = rep.a, rep.a_dag
    ada, aad = ad @ a, a @ ad
    d1 = 2 * left(a) @ right(ad) - left(ada) - right(ada)
    d2 = 2 * left(ad) @ right(a) - left(aad) - right(aad)
    return c1 * d1 + c2 * d2


def build_Kd(rep: FockRep, params: MMEParams) -> SuperOp:
    """Thermal dissipator in Lindblad form with ``c1``, ``c2`` coefficients."""
    return SuperOp(rep.dim, _dissipator_c(rep, params.c1, params.c2), params=params.as_dict())


def build_Kd_doubled(rep: FockRep, params: MMEParams) -> SuperOp:
    """Thermal dissipator written in the doubled ladder operators.

    ``(g/4)[(A - At_dag)(A + At_dag)^dag - (A - At_dag)^dag (A + At_dag)]
    - b g (A - At_dag)^dag (A - At_dag)``
    """
    ops = doubled_ops(rep)
    minus = ops.A - ops.At_dag
    plus = ops.A + ops.At_dag
    g, b = params.gamma, params.b
    mat = 0.25 * g * (minus @ plus.conj().T - minus.conj().T @ plus)
    mat = mat - b * g * minus.conj().T @ minus
    return SuperOp(rep.dim, mat, params=params.as_dict())


def build_K(rep: FockRep, params: MMEParams) -> SuperOp:
    k = build_K0(rep, params.omega0) + build_Kd(rep, params)
    return k.with_params(**params.as_dict(), model="mme")


def build_K_coordinate(rep: FockRep, params: MMEParams) -> SuperOp:
    """Same generator assembled from its coordinate-space differential form."""
    c = CoordinateOps.from_rep(rep)
    w, g, b = params.omega0, params.gamma, params.b
    k0 = -0.5j * w * (-c.dx @ c.dx + c.dxt @ c.dxt + c.x @ c.x - c.xt @ c.xt)
    kd = 0.25 * g * (c.d_plus @ c.total - c.diff @ c.d_minus)
    kd = kd + 0.5 * b * g * (c.d_plus @ c.d_plus - c.diff @ c.diff)
    return SuperOp(rep.dim, k0 + kd, params={**params.as_dict(), "model": "mme-coordinate"})


# -- squeezed-bath extension -----------------------------------------------

def build_K3(rep: FockRep) -> SuperOp:
    """``rho -> 2 a rho a - a a rho - rho a a``."""
    a = rep.a
    aa = a @ a
    return SuperOp(rep.dim, 2 * left(a) @ right(a) - left(aa) - right(aa))


def build_K3_extended(rep: FockRep, c1: float, c2: float, c3: complex) -> SuperOp:
    """``Kd(c1, c2) + c3 K3 + conj(c3) K3^dag``."""
    k3 = build_K3(rep).matrix
    mat = _dissipator_c(rep, c1, c2) + c3 * k3 + np.conj(c3) * k3.conj().T
    return SuperOp(rep.dim, mat, params={"c1": c1, "c2": c2, "c3": complex(c3)})


# -- Caldeira-Leggett and generalized generators ----------------------------

def build_CL(rep: FockRep, omega0: float, gamma1: float, b_cl: float) -> SuperOp:
    """Caldeira-Leggett generator.

    ``K0 - g1 (x - x~)(d_x - d_x~) - g1 b_cl (x - x~)^2``, i.e.
    ``K0 rho - i g1 [x, {p, rho}] - g1 b_cl [x, [x, rho]]``.
    """
    if gamma1 < 0:
        raise UnphysicalParameterError(f"gamma1 must be >= 0, got {gamma1}")
    if b_cl <= 0:
        raise UnphysicalParameterError(f"b_cl must be > 0, got {b_cl}")
    c = CoordinateOps.from_rep(rep)
    mat = build_K0(rep, omega0).matrix
    mat = mat - gamma1 * c.diff @ c.d_minus - gamma1 * b_cl * c.diff @ c.diff
    return SuperOp(rep.dim, mat, params={"omega0": omega0, "gamma1": gamma1, "b_cl": b_cl, "model": "cl"})


def gamma_term(rep: FockRep, Gamma: float) -> np.ndarray:
    """``i Gamma (x - x~)(d_x + d_x~)``, i.e. ``rho -> -Gamma [x, [p, rho]]``."""
    c = CoordinateOps.from_rep(rep)
    return 1j * Gamma * c.diff @ c.d_plus


def build_HPZ(rep: FockRep, params: HPZParams) -> SuperOp:
    """Generalized Markovian generator with the frequency-shift term ``Gamma``."""
    c = CoordinateOps.from_rep(rep)
    g2, b = params.gamma2, params.b
    Gamma = params.gamma_coefficient
    mat = build_K0(rep, params.omega0).matrix
    mat = mat - g2 * c.diff @ c.d_minus - 2 * g2 * b * c.diff @ c.diff + gamma_term(rep, Gamma)
    return SuperOp(
        rep.dim,
        mat,
        params={"omega0": params.omega0, "gamma2": g2, "b": b, "Gamma": Gamma, "model": "hpz"},
    )


# -- principal-value coefficient -------------------------------------------

def _quad(f, lo, hi, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, lo, hi, limit=400, epsabs=1e-13, epsrel=1e-12, **kw)
        except integrate.IntegrationWarning as exc:
            raise NumericError(f"quadrature on [{lo}, {hi}] did not converge: {exc}") from exc
    return val, err


def compute_gamma_coefficient(
    eta: float,
    cutoff: float,
    omega0: float,
    T: float,
    hbar: float = 1.0,
    k_B: float = 1.0,
    eps: float = 1e-2,
) -> float:
    """Principal value of ``int_0^inf I(w) b~(w) / (w^2 - omega0^2) dw``.

    Uses ``I(w) = eta w exp(-w / cutoff)``.  Writing the integrand as
    ``g(w) / (w - omega0)`` with ``g = I b~ / (w + omega0)``, the constant
    ``g(omega0)`` is subtracted on ``[0, 2 omega0]`` where its principal
    value vanishes by symmetry.  The remaining regular integrand is
    integrated outside a symmetric window ``|w - omega0| < eps``; the
    window error is odd in ``eps`` and is removed by two Richardson steps.
    """
    if eta < 0:
        raise UnphysicalParameterError(f"eta must be >= 0, got {eta}")
    if eta == 0:
        return 0.0
    if omega0 <= 0 or cutoff <= 0:
        raise UnphysicalParameterError("omega0 and cutoff must be > 0")
    if not 0 < eps < omega0 / 2:
        raise ValueError(f"eps must lie in (0, omega0/2), got {eps}")
    density = OhmicSpectralDensity(eta, cutoff)

    def g(w):
        w = np.asarray(w, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            bt = b_tilde(np.where(w > 0, w, 1.0), T, hbar, k_B)
            val = density(w) * bt / (w + omega0)
        if T > 0:
            # I(w) b~(w) -> eta k_B T / hbar as w -> 0
            val = np.where(w > 0, val, eta * k_B * T / hbar / omega0)
        return val

    g0 = float(g(omega0))

    def regular(w):
        return (float(g(w)) - g0) / (w - omega0)

    tail, tail_err = _quad(lambda w: float(g(w)) / (w - omega0), 2 * omega0, np.inf)

    def windowed(e):
        lo, _ = _quad(regular, 0.0, omega0 - e)
        hi, _ = _quad(regular, omega0 + e, 2 * omega0)
        return lo + hi

    p = [windowed(eps / 2**k) for k in range(3)]
    r1 = [2 * p[k + 1] - p[k] for k in range(2)]
    core = (8 * r1[1] - r1[0]) / 7
    result = core + tail
    if not np.isfinite(result):
        raise NumericError(f"principal value is not finite (windows {p}, tail {tail} +- {tail_err})")
    return float(result)
