"""Exact quantum dynamics of the two-mode double-well Hamiltonian.

The Hamiltonian is kept in units of the interaction strength kappa and time
runs in the dimensionless combination s = kappa * t, so the only control
parameters are the particle number N and lambda = Omega / ((N - 1) * kappa).
States are propagated through one symmetric eigendecomposition per parameter
set; there is no time-stepping error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .spin import (
    AngularMomentumSet,
    SpinQuantumNumber,
    StateVector,
    build_operators,
    expectation,
    readonly,
)

__all__ = [
    "ModelParams",
    "TwoModeHamiltonian",
    "Propagator",
    "ObservableSeries",
    "build_hamiltonian",
    "coupling_only_hamiltonian",
    "evolve",
    "fidelity",
    "observable_series",
]


@dataclass(frozen=True)
class ModelParams:
    """Particle number N and lambda = Omega / kappa_r with kappa_r = (N - 1) kappa."""

    n_particles: int
    lam: float

    def __post_init__(self):
        if isinstance(self.n_particles, bool) or not isinstance(
            self.n_particles, (int, np.integer)
        ):
            raise TypeError("n_particles must be an integer")
        if self.n_particles < 2:
            raise ValueError(f"need at least 2 particles, got {self.n_particles}")
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError(f"lambda must be finite and nonnegative, got {self.lam}")
        object.__setattr__(self, "n_particles", int(self.n_particles))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def j(self) -> SpinQuantumNumber:
        return SpinQuantumNumber(self.n_particles)

    @property
    def omega_over_kappa(self) -> float:
        """Coupling strength in units of kappa: Omega/kappa = lambda * (N - 1)."""
        return self.lam * (self.n_particles - 1)


@dataclass(frozen=True)
class TwoModeHamiltonian:
    """H / kappa as a dense real symmetric tridiagonal matrix on the Dicke basis.

    The diagonal entry at index m + j is 2 m^2 and the (m, m+1) off-diagonal is
    (Omega / 2 kappa) sqrt((j - m)(j + m + 1)).
    """

    matrix: np.ndarray
    params: ModelParams

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    @property
    def off_diagonal(self) -> np.ndarray:
        return np.diag(self.matrix, 1).copy()


def build_hamiltonian(params: ModelParams) -> TwoModeHamiltonian:
    """Assemble the tridiagonal two-mode Hamiltonian for the given parameters."""
    j = params.j
    jj = j.j
    m = j.m_values()
    off = 0.5 * params.omega_over_kappa * np.sqrt((jj - m[:-1]) * (jj + m[:-1] + 1.0))
    matrix = np.diag(2.0 * m * m)
    rows = np.arange(j.dim - 1)
    matrix[rows, rows + 1] = off
    matrix[rows + 1, rows] = off
    return TwoModeHamiltonian(matrix=readonly(matrix), params=params)


def coupling_only_hamiltonian(n_particles: int) -> np.ndarray:
    """The tunneling term alone: the matrix is jx, time in units of 1/Omega.

    This limit (interaction switched off) exists purely as a cross-check hook:
    starting from |j, -j> it produces the analytic rotation
    <jz>(t) = -j cos(Omega t). It is not part of the physical model, whose
    interaction term is always present.
    """
    ops = build_operators(SpinQuantumNumber(n_particles))
    return np.array(ops.jx, dtype=float)


@dataclass(frozen=True)
class Propagator:
    """Spectral decomposition of a two-mode Hamiltonian, H = V diag(E) V^T.

    Immutable; one instance can serve any number of concurrent time samples.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    matrix: np.ndarray
    j: SpinQuantumNumber

    @classmethod
    def from_hamiltonian(cls, ham: TwoModeHamiltonian) -> "Propagator":
        w, v = eigh_tridiagonal(ham.diagonal, ham.off_diagonal)
        return cls(
            eigenvalues=readonly(w),
            eigenvectors=readonly(v),
            matrix=ham.matrix,
            j=ham.params.j,
        )

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Propagator":
        """Decompose an arbitrary real symmetric matrix on a Dicke basis."""
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
        if not np.allclose(matrix, matrix.T):
            raise ValueError("matrix is not symmetric")
        w, v = np.linalg.eigh(matrix)
        return cls(
            eigenvalues=readonly(w),
            eigenvectors=readonly(v),
            matrix=readonly(matrix),
            j=SpinQuantumNumber(matrix.shape[0] - 1),
        )

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruction_error(self) -> float:
        """Max elementwise deviation of V diag(E) V^T from H, relative to ||H||_2."""
        rebuilt = (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T
        scale = max(float(np.max(np.abs(self.eigenvalues))), np.finfo(float).tiny)
        return float(np.max(np.abs(rebuilt - self.matrix))) / scale

    def orthogonality_error(self) -> float:
        """Max elementwise deviation of V^T V from the identity."""
        gram = self.eigenvectors.T @ self.eigenvectors
        return float(np.max(np.abs(gram - np.eye(self.dim))))


def evolve(prop: Propagator, psi0: StateVector, s: float) -> StateVector:
    """Propagate psi0 by the dimensionless time s = kappa * t.

    Exact up to eigensolver accuracy; negative s runs the evolution backwards.
    """
    if psi0.dim != prop.dim:
        raise ValueError(f"state dimension {psi0.dim} does not match propagator {prop.dim}")
    if not math.isfinite(s):
        raise ValueError(f"time must be finite, got {s}")
    if s == 0.0:
        return psi0
    coeff = prop.eigenvectors.T @ psi0.amplitudes
    amplitudes = prop.eigenvectors @ (np.exp(-1j * prop.eigenvalues * s) * coeff)
    return StateVector(amplitudes, psi0.j)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>| for two normalized states; symmetric in its arguments."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return min(float(np.abs(np.vdot(a.amplitudes, b.amplitudes))), 1.0)


@dataclass(frozen=True)
class ObservableSeries:
    """Per-time records of (<jx>, <jy>, <jz>), overlap with psi0, and energy."""

    times: np.ndarray
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    fidelity: np.ndarray
    energy: np.ndarray


def observable_series(
    prop: Propagator,
    psi0: StateVector,
    ops: AngularMomentumSet,
    times: np.ndarray,
) -> ObservableSeries:
    """Evolve psi0 to each requested time and record the standard observables.

    The energy column (in units of kappa) is constant along the trajectory up
    to eigensolver rounding.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise ValueError("times must be a one-dimensional array")
    if not np.all(np.isfinite(times)):
        raise ValueError("times must be finite")
    if ops.dim != prop.dim:
        raise ValueError("operator set does not match propagator dimension")

    n = times.shape[0]
    jx = np.empty(n)
    jy = np.empty(n)
    jz = np.empty(n)
    fid = np.empty(n)
    energy = np.empty(n)
    for i, s in enumerate(times):
        psi = evolve(prop, psi0, float(s))
        jx[i], jy[i], jz[i] = expectation(ops, psi)
        fid[i] = fidelity(psi0, psi)
        energy[i] = float(np.vdot(psi.amplitudes, prop.matrix @ psi.amplitudes).real)
    return ObservableSeries(
        times=readonly(times.copy()),
        jx=readonly(jx),
        jy=readonly(jy),
        jz=readonly(jz),
        fidelity=readonly(fid),
        energy=readonly(energy),
    )
