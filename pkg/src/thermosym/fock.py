"""Truncated Fock-basis operators and their lifts to Liouville space.

Density matrices are vectorized by column stacking, so that the map
``rho -> X @ rho @ Y`` is represented by ``kron(Y.T, X)`` acting on
``vec(rho)``.  The element ``rho[m, n]`` sits at position ``m + N * n``.

The tilde (right-acting) operators follow the thermofield convention::

    A       = lift_left(a)        rho -> a rho
    A_dag   = lift_left(a_dag)    rho -> a_dag rho
    At      = lift_right(a_dag)   rho -> rho a_dag
    At_dag  = lift_right(a)       rho -> rho a

Truncation spoils the ladder algebra on the top Fock levels, so exact
identities are only checked on an interior window of levels ``0..M``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .errors import InvalidDimensionError, ShapeError, TruncationWindowError

COLUMN_STACKING = "column-stacking"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FockRep:
    """Ladder, position and momentum matrices on ``dim`` Fock levels."""

    dim: int
    a: np.ndarray
    a_dag: np.ndarray
    x_hat: np.ndarray
    p_hat: np.ndarray

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    @property
    def number(self) -> np.ndarray:
        return self.a_dag @ self.a


def make_fock_rep(dim: int) -> FockRep:
    """Build the truncated single-mode operators.

    ``a[m, m+1] = sqrt(m+1)``; ``x = (a + a_dag)/sqrt(2)`` and
    ``p = (a - a_dag)/(i sqrt(2))``.
    """
    if not isinstance(dim, (int, np.integer)) or dim < 2:
        raise InvalidDimensionError(f"Fock dimension must be an integer >= 2, got {dim!r}")
    dim = int(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    a_dag = a.conj().T
    x_hat = (a + a_dag) / np.sqrt(2)
    p_hat = (a - a_dag) / (1j * np.sqrt(2))
    return FockRep(dim, _frozen(a), _frozen(a_dag), _frozen(x_hat), _frozen(p_hat))


@dataclass(frozen=True)
class DensityState:
    """A density matrix together with its column-stacked vector."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"density matrix must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "DensityState":
        return cls(devectorize(v))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def vector(self) -> np.ndarray:
        return vectorize(self.matrix)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_defect(self) -> float:
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T))

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.trace(op @ self.matrix))

    def is_physical(self, tol: float = 1e-8) -> bool:
        return abs(self.trace - 1) <= tol and self.hermiticity_defect() <= tol


@dataclass(frozen=True)
class SuperOp:
    """Dense ``N^2 x N^2`` matrix acting on column-stacked density matrices."""

    dim: int
    matrix: np.ndarray
    convention: str = COLUMN_STACKING
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        n2 = self.dim * self.dim
        if mat.shape != (n2, n2):
            raise ShapeError(f"superoperator for dim={self.dim} must be {n2}x{n2}, got {mat.shape}")
        object.__setattr__(self, "matrix", _frozen(mat))
        object.__setattr__(self, "params", dict(self.params))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Act on an ``N x N`` matrix and return the image as a matrix."""
        return devectorize(self.matrix @ vectorize(rho))

    def _coerce(self, other):
        if isinstance(other, SuperOp):
            if other.dim != self.dim:
                raise ShapeError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other.matrix
        return np.asarray(other)

    def __add__(self, other):
        return SuperOp(self.dim, self.matrix + self._coerce(other), params=self.params)

    def __sub__(self, other):
        return SuperOp(self.dim, self.matrix - self._coerce(other), params=self.params)

    def __neg__(self):
        return SuperOp(self.dim, -self.matrix, params=self.params)

    def __mul__(self, scalar):
        return SuperOp(self.dim, scalar * self.matrix, params=self.params)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, SuperOp):
            return SuperOp(self.dim, self.matrix @ self._coerce(other), params=self.params)
        return self.matrix @ np.asarray(other)

    @property
    def dagger(self) -> "SuperOp":
        return SuperOp(self.dim, self.matrix.conj().T, params=self.params)

    def with_params(self, **params) -> "SuperOp":
        return SuperOp(self.dim, self.matrix, params={**self.params, **params})


def vectorize(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {rho.shape}")
    return rho.reshape(-1, order="F")


def devectorize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    if v.ndim != 1:
        raise ShapeError(f"expected a 1-d vector, got shape {v.shape}")
    n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ShapeError(f"vector length {v.size} is not a perfect square")
    return v.reshape((n, n), order="F")


def _check_square(x: np.ndarray, dim: int | None = None) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {x.shape}")
    if dim is not None and x.shape[0] != dim:
        raise ShapeError(f"expected a {dim}x{dim} matrix, got {x.shape}")
    return x


def left(x: np.ndarray) -> np.ndarray:
    """Raw matrix of ``rho -> x rho``."""
    x = _check_square(x)
    return np.kron(np.eye(x.shape[0]), x)


def right(y: np.ndarray) -> np.ndarray:
    """Raw matrix of ``rho -> rho y``."""
    y = _check_square(y)
    return np.kron(y.T, np.eye(y.shape[0]))


def lift_left(x: np.ndarray, dim: int | None = None) -> SuperOp:
    x = _check_square(x, dim)
    return SuperOp(x.shape[0], left(x))


def lift_right(y: np.ndarray, dim: int | None = None) -> SuperOp:
    y = _check_square(y, dim)
    return SuperOp(y.shape[0], right(y))


@dataclass(frozen=True)
class DoubledOps:
    """The four Liouville-space ladder operators as raw matrices."""

    A: np.ndarray
    A_dag: np.ndarray
    At: np.ndarray
    At_dag: np.ndarray

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.A.shape[0], dtype=complex)


def doubled_ops(rep: FockRep) -> DoubledOps:
    return DoubledOps(
        A=left(rep.a),
        A_dag=left(rep.a_dag),
        At=right(rep.a_dag),
        At_dag=right(rep.a),
    )


def window_indices(dim: int, window: int) -> np.ndarray:
    """Vector positions of ``rho[m, n]`` with ``m, n <= window``."""
    if window < 0 or window >= dim:
        raise TruncationWindowError(f"window {window} outside 0..{dim - 1}")
    levels = np.arange(window + 1)
    m, n = np.meshgrid(levels, levels, indexing="ij")
    return (m + dim * n).ravel(order="F")


def project(op, dim: int, window: int) -> np.ndarray:
    """Compress a superoperator (or raw matrix) onto the interior window."""
    mat = op.matrix if isinstance(op, SuperOp) else np.asarray(op)
    idx = window_indices(dim, window)
    return mat[np.ix_(idx, idx)]


def window_norm(op, dim: int, window: int) -> float:
    return float(np.linalg.norm(project(op, dim, window)))


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


@dataclass(frozen=True)
class CommutatorReport:
    dim: int
    window: int
    ladder: float
    tilde_ladder: float
    mixed: float
    difference_normal: float
    edge_included: bool
    edge_defect: complex

    @property
    def residuals(self) -> dict:
        return {
            "ladder": self.ladder,
            "tilde_ladder": self.tilde_ladder,
            "mixed": self.mixed,
            "difference_normal": self.difference_normal,
        }

    def passed(self, tol: float = 1e-12) -> bool:
        return not self.edge_included and max(self.residuals.values()) < tol


def doubled_commutators_check(rep: FockRep, window: int) -> CommutatorReport:
    """Check the doubled-space commutation relations on levels ``0..window``.

    Residuals are Frobenius norms of the window-compressed defects of
    ``[A, A_dag] = 1``, ``[At, At_dag] = 1``, the largest mixed
    tilde/non-tilde commutator, and ``[A - At_dag, (A - At_dag)^dag] = 0``.
    A window reaching the top level is reported with ``edge_included`` set
    and the truncation defect of ``[a, a_dag] - 1`` at that level.
    """
    n = rep.dim
    if window >= n or window < 0:
        raise TruncationWindowError(f"window {window} must satisfy 0 <= window <= {n - 1}")
    ops = doubled_ops(rep)
    one = ops.identity

    def wn(x):
        return window_norm(x, n, window)

    mixed = max(
        wn(commutator(x, y))
        for x in (ops.A, ops.A_dag)
        for y in (ops.At, ops.At_dag)
    )
    diff = ops.A - ops.At_dag
    edge_included = window == n - 1
    edge_defect = complex((commutator(rep.a, rep.a_dag) - rep.identity)[n - 1, n - 1])
    return CommutatorReport(
        dim=n,
        window=window,
        ladder=wn(commutator(ops.A, ops.A_dag) - one),
        tilde_ladder=wn(commutator(ops.At, ops.At_dag) - one),
        mixed=mixed,
        difference_normal=wn(commutator(diff, diff.conj().T)),
        edge_included=edge_included,
        edge_defect=edge_defect if edge_included else 0j,
    )
