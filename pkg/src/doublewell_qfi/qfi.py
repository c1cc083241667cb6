"""Quantum Fisher information for rotations generated by J along a direction n.

Both the pure-state and the mixed-state paths produce a real symmetric 3x3
matrix C with the single convention F(n) = n . C . n^T, so the maximal QFI is
always the top eigenvalue of C (the pure-state variance matrix absorbs its
conventional factor of 4 into C).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spin import AngularMomentumSet, StateVector, readonly, symmetrized_second_moments, expectation

__all__ = [
    "DensityOperator",
    "QfiMatrix",
    "pure_qfi_matrix",
    "mixed_qfi_matrix",
    "max_mean_qfi",
    "cramer_rao_bound",
]

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
# density-operator eigenvalues may round below zero by this much before we reject
DENSITY_EIGEN_TOL = 1e-10
# default floor under which an eigenvalue pair is dropped from the mixed-state sum
EIGEN_FLOOR_DEFAULT = 1e-10
# C eigenvalues may round below zero by this much (relative to the matrix
# scale once that exceeds 1); anything within is clamped to 0
PSD_TOL = 1e-9
# top eigenvalues closer than this (relative to the matrix scale) are treated
# as degenerate for direction picking
TIE_TOL = 1e-10


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace density matrix on the Dicke basis."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
        deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
        if deviation > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian (deviation {deviation!r})")
        trace = complex(np.trace(matrix))
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"trace must be 1, got {trace!r}")
        object.__setattr__(self, "matrix", readonly(matrix))

    @classmethod
    def from_pure(cls, state: StateVector) -> "DensityOperator":
        psi = state.amplitudes
        return cls(np.outer(psi, psi.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class QfiMatrix:
    """Sensitivity matrix C with F(n) = n . C . n^T.

    ``eigenvalues`` are sorted descending and clamped at zero;
    ``optimal_direction`` is a unit vector reaching the top eigenvalue. When
    the top eigenvalue is degenerate the direction is the unit vector of the
    top eigenspace with the largest |n_z| component, then largest |n_y|, which
    makes the output deterministic.
    """

    c: np.ndarray
    eigenvalues: np.ndarray
    optimal_direction: np.ndarray

    @classmethod
    def from_matrix(cls, c: np.ndarray) -> "QfiMatrix":
        c = np.asarray(c, dtype=float)
        if c.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {c.shape}")
        c = 0.5 * (c + c.T)
        w, v = np.linalg.eigh(c)
        scale = max(1.0, float(np.max(np.abs(w))))
        if w[0] < -PSD_TOL * scale:
            raise ValueError(f"matrix is not positive semidefinite: min eigenvalue {w[0]!r}")
        w = np.clip(w[::-1], 0.0, None)
        v = v[:, ::-1]
        direction = _pick_direction(w, v, scale)
        return cls(
            c=readonly(c),
            eigenvalues=readonly(w),
            optimal_direction=readonly(direction),
        )

    @property
    def f_max(self) -> float:
        """Maximal QFI over rotation directions (top eigenvalue of C)."""
        return float(self.eigenvalues[0])

    def sensitivity(self, direction: np.ndarray) -> float:
        """F(n) = n . C . n^T for a unit direction n."""
        n = np.asarray(direction, dtype=float)
        norm = float(np.linalg.norm(n))
        if not math.isclose(norm, 1.0, rel_tol=0.0, abs_tol=1e-9):
            raise ValueError(f"direction must be a unit vector, |n| = {norm!r}")
        return float(n @ self.c @ n)


def _pick_direction(w: np.ndarray, v: np.ndarray, scale: float) -> np.ndarray:
    top = v[:, w[0] - w <= TIE_TOL * scale]
    direction = None
    for axis in range(2, -1, -1):  # prefer |n_z|, then |n_y|, then |n_x|
        projected = top @ top[axis, :]
        norm = float(np.linalg.norm(projected))
        if norm > 1e-8:
            direction = projected / norm
            break
    if direction is None:  # unreachable: top has at least one unit column
        direction = top[:, 0]
    for component in (direction[2], direction[1], direction[0]):
        if abs(component) > 1e-12:
            if component < 0.0:
                direction = -direction
            break
    return direction


def pure_qfi_matrix(state: StateVector, ops: AngularMomentumSet) -> QfiMatrix:
    """QFI matrix of a pure state: C = 4 (second moments - outer(<J>, <J>)).

    For a pure state the QFI along n is four times the variance of J_n, so
    this C already satisfies F(n) = n . C . n^T.
    """
    norm_sq = float(np.real(np.vdot(state.amplitudes, state.amplitudes)))
    if abs(norm_sq - 1.0) > 1e-9:
        raise ValueError(f"state is not normalized: sum |c_m|^2 = {norm_sq!r}")
    mean = expectation(ops, state)
    moments = symmetrized_second_moments(ops, state)
    return QfiMatrix.from_matrix(4.0 * (moments - np.outer(mean, mean)))


def mixed_qfi_matrix(
    rho: DensityOperator,
    ops: AngularMomentumSet,
    eigen_floor: float = EIGEN_FLOOR_DEFAULT,
) -> QfiMatrix:
    """QFI matrix of a density operator from its spectral decomposition.

    Entry (k, l) sums (p_i - p_j)^2 / (p_i + p_j) times the symmetrized
    product of J_k and J_l matrix elements over eigenpairs i != j. Pairs with
    p_i + p_j <= eigen_floor contribute 0/0 and are skipped.

    On a pure-state projector this reproduces ``pure_qfi_matrix``.
    """
    if not (math.isfinite(eigen_floor) and eigen_floor >= 0.0):
        raise ValueError(f"eigen_floor must be finite and nonnegative, got {eigen_floor}")
    if rho.dim != ops.dim:
        raise ValueError(f"density matrix dimension {rho.dim} does not match operators {ops.dim}")

    is_real = not np.any(rho.matrix.imag)
    if is_real:
        p, u = np.linalg.eigh(rho.matrix.real)
    else:
        p, u = np.linalg.eigh(rho.matrix)
    if p[0] < -DENSITY_EIGEN_TOL:
        raise ValueError(f"density matrix has eigenvalue {p[0]!r} below tolerance")
    p = np.clip(p, 0.0, None)

    pair_sum = p[:, None] + p[None, :]
    keep = pair_sum > eigen_floor
    weights = np.zeros_like(pair_sum)
    np.divide((p[:, None] - p[None, :]) ** 2, pair_sum, out=weights, where=keep)

    if is_real:
        # real orthogonal eigenbasis: jx and jz transform with real matmuls and
        # jy through its (contiguous) imaginary part, which is much faster here
        jy_imag = np.ascontiguousarray(ops.jy.imag)
        in_eigenbasis = [
            u.T @ (ops.jx @ u),
            1j * (u.T @ (jy_imag @ u)),
            u.T @ (ops.jz @ u),
        ]
    else:
        in_eigenbasis = [u.conj().T @ (op @ u) for op in (ops.jx, ops.jy, ops.jz)]
    c = np.empty((3, 3), dtype=np.complex128)
    for a in range(3):
        for b in range(a, 3):
            term = in_eigenbasis[a] * in_eigenbasis[b].conj()
            c[a, b] = c[b, a] = np.sum(weights * (term + term.conj()))
    residue = float(np.max(np.abs(c.imag)))
    if residue > 1e-10:
        raise ValueError(f"imaginary residue {residue!r} in the QFI matrix")
    return QfiMatrix.from_matrix(c.real)


def max_mean_qfi(qm: QfiMatrix, n_particles: int) -> float:
    """Maximal QFI per particle, f_max / N."""
    if n_particles < 1:
        raise ValueError(f"particle number must be at least 1, got {n_particles}")
    return qm.f_max / n_particles


def cramer_rao_bound(f: float, v: int = 1) -> float:
    """Phase-estimation lower bound 1 / sqrt(v * f) for v repetitions."""
    if not (math.isfinite(f) and f > 0.0):
        raise ValueError(f"QFI must be positive, got {f}")
    if v < 1:
        raise ValueError(f"experiment count must be at least 1, got {v}")
    return 1.0 / math.sqrt(v * f)
