"""Thermal Bogoliubov rotation and the related group structures.

The rotation ``U(theta) = exp(i G theta)`` with ``G = i(A At - A_dag At_dag)``
mixes ``A`` with ``At_dag``::

    U A U^dag      = cosh(theta) A - sinh(theta) At_dag
    U At_dag U^dag = -sinh(theta) A + cosh(theta) At_dag

so that ``U K(b) U^dag = K(b e^{2 theta})`` for the rotating-wave and
Caldeira-Leggett generators.

``G`` acts like a two-mode squeezer on the pair of Fock indices of
``rho[m, n]``.  Truncation errors therefore leak from the top levels into
the interior at a rate that grows quickly with ``theta``.  Every rotation is
audited against the exact Bogoliubov action on the interior window, and a
failed audit raises :class:`TruncationAccuracyError` unless explicitly
disabled.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import linalg

from .errors import ReductionFailure, ShapeError, TruncationAccuracyError, UnphysicalParameterError
from .fock import FockRep, SuperOp, commutator, doubled_ops, left, make_fock_rep, right, window_norm
from .superops import CoordinateOps, HPZParams, MMEParams, b_tilde, build_CL, build_HPZ, build_K

logger = logging.getLogger(__name__)

Builder = Callable[[FockRep, float], SuperOp]


# -- generators ---------------------------------------------------------------

def generator_G(rep: FockRep) -> np.ndarray:
    """``G = i (A At - A_dag At_dag)``, Hermitian on Liouville space."""
    ops = doubled_ops(rep)
    return 1j * (ops.A @ ops.At - ops.A_dag @ ops.At_dag)


def generator_G_coordinate(rep: FockRep) -> np.ndarray:
    """``G = i (x d/dx~ + x~ d/dx)`` through the coordinate dictionary."""
    c = CoordinateOps.from_rep(rep)
    return 1j * (c.x @ c.dxt + c.xt @ c.dx)


# -- small matrix avatars -----------------------------------------------------

def hyperbolic_R(theta: float) -> np.ndarray:
    ch, sh = math.cosh(theta), math.sinh(theta)
    return np.array([[ch, sh], [sh, ch]])


SWAP2 = np.array([[0.0, 1.0], [1.0, 0.0]])
OMEGA4 = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
J4 = linalg.block_diag(SWAP2, -SWAP2)


def symplectic_S(theta: float) -> np.ndarray:
    """``exp(theta J)`` acting on ``(x, x~, p, p~)``."""
    return linalg.expm(theta * J4)


def symplectic_S_closed(theta: float) -> np.ndarray:
    """``blockdiag(R(theta), R(theta)^-1)``."""
    return linalg.block_diag(hyperbolic_R(theta), hyperbolic_R(-theta))


def omega_check(S: np.ndarray) -> float:
    """Norm of ``S Omega S^T - Omega``."""
    S = np.asarray(S)
    if S.shape != (4, 4):
        raise ShapeError(f"expected a 4x4 matrix, got {S.shape}")
    return float(np.linalg.norm(S @ OMEGA4 @ S.T - OMEGA4))


def phase_space_vector(rep: FockRep) -> list[np.ndarray]:
    """Liouville-space operators ``(x, x~, p, p~)`` with ``[X_i, X_j] = i Omega_ij``."""
    return [left(rep.x_hat), right(rep.x_hat), left(rep.p_hat), -right(rep.p_hat)]


# -- rotation -----------------------------------------------------------------

def theta_from_b(b: float, b_prime: float) -> float:
    """Rotation angle carrying thermal parameter ``b`` to ``b_prime``."""
    for name, val in (("b", b), ("b_prime", b_prime)):
        if not np.isfinite(val) or val < 0.5:
            raise UnphysicalParameterError(f"{name} must be finite and >= 1/2, got {val}")
    return 0.5 * math.log(b_prime / b)


def min_theta(b: float) -> float:
    """Smallest physical angle from ``b``: it lands on ``b' = 1/2``."""
    return -0.5 * math.log(2 * b)


@dataclass(frozen=True)
class ThermalRotation:
    theta: float
    dim: int
    window: int
    U: np.ndarray = field(repr=False)
    action_residual: float

    @property
    def R2(self) -> np.ndarray:
        return hyperbolic_R(self.theta)

    @property
    def S4(self) -> np.ndarray:
        return symplectic_S_closed(self.theta)


def _expi(G: np.ndarray, theta: float) -> np.ndarray:
    w, V = np.linalg.eigh(G)
    return (V * np.exp(1j * theta * w)) @ V.conj().T


def bogoliubov_action_residual(rep: FockRep, U: np.ndarray, theta: float, window: int) -> float:
    """Interior norm of ``U A U^dag - (cosh A - sinh At_dag)``."""
    ops = doubled_ops(rep)
    target = math.cosh(theta) * ops.A - math.sinh(theta) * ops.At_dag
    return window_norm(U @ ops.A @ U.conj().T - target, rep.dim, window)


def rotation_U(
    rep: FockRep,
    theta: float,
    window: int | None = None,
    tol: float = 1e-8,
    enforce_budget: bool = True,
) -> ThermalRotation:
    """Build ``U(theta)`` and audit it on levels ``0..window``.

    The default window is ``dim // 2``.  If the Bogoliubov action residual
    exceeds ``tol`` the rotation is outside the truncation accuracy budget
    and :class:`TruncationAccuracyError` is raised (unless
    ``enforce_budget`` is false, in which case the residual is recorded on
    the result).
    """
    if window is None:
        window = rep.dim // 2
    U = _expi(generator_G(rep), theta)
    resid = bogoliubov_action_residual(rep, U, theta, window)
    if enforce_budget and resid > tol:
        raise TruncationAccuracyError(
            f"theta={theta:g} exceeds the truncation budget at dim={rep.dim}, window={window}: "
            f"Bogoliubov action residual {resid:.3g} > {tol:g}; increase dim "
            f"(e.g. {2 * rep.dim}) or shrink the window",
            residual=resid,
            suggested_dim=2 * rep.dim,
        )
    return ThermalRotation(theta=theta, dim=rep.dim, window=window, U=U, action_residual=resid)


def transform_superop(K: SuperOp, rot: ThermalRotation) -> SuperOp:
    """``U K U^dag``."""
    if K.dim != rot.dim:
        raise ShapeError(f"superoperator dim {K.dim} does not match rotation dim {rot.dim}")
    U = rot.U
    return SuperOp(K.dim, U @ K.matrix @ U.conj().T, params={**K.params, "theta": rot.theta})


# -- builders parameterized by the thermal coefficient -----------------------

def mme_builder(omega0: float, gamma: float) -> Builder:
    def build(rep, b):
        return build_K(rep, MMEParams(omega0, gamma, b))
    return build


def cl_builder(omega0: float, gamma1: float) -> Builder:
    def build(rep, b_cl):
        return build_CL(rep, omega0, gamma1, b_cl)
    return build


def hpz_builder(template: HPZParams) -> Builder:
    def build(rep, b):
        return build_HPZ(rep, template.at_b(b))
    return build


@dataclass(frozen=True)
class SymmetryResult:
    residual: float
    theta: float
    dim: int
    window: int
    action_residual: float


def symmetry_check(
    builder: Builder,
    b: float,
    b_prime: float,
    dim: int,
    window: int | None = None,
    theta: float | None = None,
    tol: float = 1e-8,
    enforce_budget: bool = True,
) -> SymmetryResult:
    """Relative interior residual of ``U K(b) U^dag - K(b')``."""
    rep = make_fock_rep(dim)
    if window is None:
        window = dim // 2
    if theta is None:
        if b <= 0 or b_prime <= 0:
            raise UnphysicalParameterError("thermal coefficients must be positive")
        theta = 0.5 * math.log(b_prime / b)
    rot = rotation_U(rep, theta, window, tol=tol, enforce_budget=enforce_budget)
    target = builder(rep, b_prime)
    diff = transform_superop(builder(rep, b), rot) - target
    resid = window_norm(diff, dim, window) / window_norm(target, dim, window)
    return SymmetryResult(resid, theta, dim, window, rot.action_residual)


def symmetry_residual(builder: Builder, b: float, b_prime: float, dim: int, window: int | None = None, **kw) -> float:
    return symmetry_check(builder, b, b_prime, dim, window, **kw).residual


def coth_ratio_scan(T: float, T_prime: float, omega0: float, omega_grid, hbar: float = 1.0, k_B: float = 1.0) -> float:
    """Largest deviation over ``omega_grid`` of ``b~'(w)/b~(w)`` from its value at ``omega0``.

    A frequency-independent rescaling of ``b~`` exists only if this is zero.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    if np.any(omega_grid <= 0):
        raise ValueError("frequency grid must be positive")
    ratio = b_tilde(omega_grid, T_prime, hbar, k_B) / b_tilde(omega_grid, T, hbar, k_B)
    ref = b_tilde(omega0, T_prime, hbar, k_B) / b_tilde(omega0, T, hbar, k_B)
    return float(np.max(np.abs(ratio - ref)))


# -- su(1,1) ------------------------------------------------------------------

@dataclass(frozen=True)
class SU11Algebra:
    M0: np.ndarray
    M1: np.ndarray
    M2: np.ndarray


def su11_generators(rep: FockRep) -> SU11Algebra:
    ops = doubled_ops(rep)
    pair_up = ops.A_dag @ ops.At_dag
    pair_down = ops.A @ ops.At
    return SU11Algebra(
        M0=0.5 * (ops.A_dag @ ops.A + ops.At_dag @ ops.At + ops.identity),
        M1=0.5 * (pair_up + pair_down),
        M2=-0.5j * (pair_up - pair_down),
    )


def su11_residuals(alg: SU11Algebra, dim: int, window: int) -> dict:
    M0, M1, M2 = alg.M0, alg.M1, alg.M2
    return {
        "[M1,M2]+iM0": window_norm(commutator(M1, M2) + 1j * M0, dim, window),
        "[M2,M0]-iM1": window_norm(commutator(M2, M0) - 1j * M1, dim, window),
        "[M0,M1]-iM2": window_norm(commutator(M0, M1) - 1j * M2, dim, window),
    }


# -- squeezed-bath reduction --------------------------------------------------

@dataclass(frozen=True)
class EkertReduction:
    u: float
    v: complex
    residual: float
    coefficients: dict
    iterations: int
    tilde_commutator: float

    @property
    def nu(self) -> float:
        return math.asinh(abs(self.v))

    @property
    def eta(self) -> float:
        return math.atan2(self.v.imag, self.v.real) % (2 * math.pi)


def _structures(op: np.ndarray) -> list[np.ndarray]:
    """Dissipator structures built on ladder-like operator ``op``.

    Order: ``D[op]``, ``D[op^dag]``, ``K3[op]``, ``K3[op]^dag``, identity.
    """
    L, Ld = op, op.conj().T
    return [
        2 * left(L) @ right(Ld) - left(Ld @ L) - right(Ld @ L),
        2 * left(Ld) @ right(L) - left(L @ Ld) - right(L @ Ld),
        2 * left(L) @ right(L) - left(L @ L) - right(L @ L),
        2 * left(Ld) @ right(Ld) - left(Ld @ Ld) - right(Ld @ Ld),
        np.eye(L.shape[0] ** 2, dtype=complex),
    ]


def _project_coefficients(target: np.ndarray, op: np.ndarray, dim: int, window: int) -> np.ndarray:
    from .fock import project

    cols = [project(s, dim, window).ravel() for s in _structures(op)]
    basis = np.stack(cols, axis=1)
    q, r = np.linalg.qr(basis)
    return linalg.solve_triangular(r, q.conj().T @ project(target, dim, window).ravel())


def ekert_reduce(
    rep: FockRep,
    c1: float,
    c2: float,
    c3: complex,
    window: int | None = None,
    tol: float = 1e-10,
    max_iter: int = 50,
    allow_nonpositive: bool = False,
) -> EkertReduction:
    """Find ``a_ = u a + v a_dag`` removing the ``K3`` terms of the extended dissipator.

    The extended dissipator is expanded in the structures built on ``a_``
    (projected on the interior window) and the ``K3[a_]`` coefficient is
    driven to zero by damped Newton iteration in ``(Re v, Im v)`` with
    ``u = sqrt(1 + |v|^2)``.
    """
    if not allow_nonpositive and (c1 < 0 or c2 < 0 or abs(c3) ** 2 > c1 * c2):
        raise UnphysicalParameterError(
            f"(c1, c2, c3) = ({c1}, {c2}, {c3}) violates |c3|^2 <= c1 c2 with c1, c2 >= 0"
        )
    from .superops import build_K3_extended

    dim = rep.dim
    if window is None:
        window = dim - 4
    target = build_K3_extended(rep, c1, c2, c3).matrix

    def coeffs(z):
        v = z[0] + 1j * z[1]
        u = math.sqrt(1 + abs(v) ** 2)
        return _project_coefficients(target, u * rep.a + v * rep.a_dag, dim, window)

    def F(z):
        beta = coeffs(z)[2]
        return np.array([beta.real, beta.imag])

    z = np.zeros(2)
    f = F(z)
    it = 0
    while np.linalg.norm(f) > tol and it < max_iter:
        it += 1
        h = 1e-7
        jac = np.column_stack([(F(z + h * e) - F(z - h * e)) / (2 * h) for e in np.eye(2)])
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        lam = 1.0
        while lam > 1e-6:
            trial = z + lam * step
            ft = F(trial)
            if np.linalg.norm(ft) < np.linalg.norm(f):
                break
            lam /= 2
        z, f = trial, ft
    resid = float(np.linalg.norm(f))
    if resid > tol:
        raise ReductionFailure(
            f"no (u, v) reduced the K3 coefficient below {tol:g}; best residual {resid:.3g} after {it} iterations"
        )
    v = complex(z[0], z[1])
    u = math.sqrt(1 + abs(v) ** 2)
    c = coeffs(z)
    a_new = u * rep.a + v * rep.a_dag
    lifted = left(a_new)
    tilde = 0.0
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim))
            e[i, j] = 1.0
            tilde = max(tilde, float(np.abs(commutator(lifted, right(e))).max()))
    return EkertReduction(
        u=u,
        v=v,
        residual=resid,
        coefficients={"c1": c[0], "c2": c[1], "c3": c[2], "c3_conj_term": c[3], "identity": c[4]},
        iterations=it,
        tilde_commutator=tilde,
    )
