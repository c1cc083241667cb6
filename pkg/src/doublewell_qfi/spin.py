"""Collective spin algebra on the Dicke basis ``|j, m>``.

N two-mode bosons map onto a single collective spin j = N/2. Every matrix
in this module acts on the (2j+1)-dimensional Dicke basis ordered by
ascending magnetic quantum number m = -j, ..., +j, so the amplitude at
index i belongs to m = i - j.

All containers freeze their arrays after construction, so instances are
immutable and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpinQuantumNumber",
    "AngularMomentumSet",
    "StateVector",
    "build_operators",
    "dicke_state",
    "spin_coherent_state",
    "expectation",
    "symmetrized_second_moments",
]

# tolerance on |sum_m |c_m|^2 - 1| accepted by StateVector
NORM_TOL = 1e-9
# largest imaginary residue tolerated on an expectation value that must be real
IMAG_RESIDUE_TOL = 1e-10


def readonly(array: np.ndarray) -> np.ndarray:
    """Mark ``array`` read-only and hand it back."""
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SpinQuantumNumber:
    """Total spin stored as the integer 2j, so half-integer j never needs a float.

    The particle count is N = 2j.
    """

    twice_j: int

    def __post_init__(self):
        if isinstance(self.twice_j, bool) or not isinstance(self.twice_j, (int, np.integer)):
            raise TypeError(f"2j must be an integer, got {type(self.twice_j).__name__}")
        if self.twice_j <= 0:
            raise ValueError(f"2j must be positive, got {self.twice_j}")
        object.__setattr__(self, "twice_j", int(self.twice_j))

    @classmethod
    def from_j(cls, j: float) -> "SpinQuantumNumber":
        twice = round(2.0 * j)
        if abs(2.0 * j - twice) > 1e-12:
            raise ValueError(f"j must be integer or half-integer, got {j}")
        return cls(twice)

    @classmethod
    def from_particles(cls, n: int) -> "SpinQuantumNumber":
        return cls(n)

    @property
    def j(self) -> float:
        return self.twice_j / 2.0

    @property
    def n_particles(self) -> int:
        return self.twice_j

    @property
    def dim(self) -> int:
        return self.twice_j + 1

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers in basis order, -j ascending to +j."""
        return np.arange(self.dim) - self.j


@dataclass(frozen=True)
class AngularMomentumSet:
    """Dense angular momentum matrices for one spin j.

    ``jx`` and ``jz`` are real symmetric, ``jy`` is purely imaginary
    antisymmetric, and ``jz2`` is the real diagonal matrix of ``jz`` squared.
    """

    j: SpinQuantumNumber
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jz2: np.ndarray

    @property
    def dim(self) -> int:
        return self.j.dim


@dataclass(frozen=True)
class StateVector:
    """Normalized state over the Dicke basis; amplitude index i holds m = i - j."""

    amplitudes: np.ndarray
    j: SpinQuantumNumber

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.j.dim,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, expected ({self.j.dim},)"
            )
        norm_sq = float(np.real(np.vdot(amps, amps)))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |c_m|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", readonly(amps))

    @property
    def dim(self) -> int:
        return self.j.dim


def build_operators(j: SpinQuantumNumber) -> AngularMomentumSet:
    """Construct jx, jy, jz and jz^2 from the ladder matrix elements.

    The raising operator carries ``<j,m+1|J+|j,m> = sqrt(j(j+1) - m(m+1))``;
    jx and jy follow from the usual ladder combinations.

    Parameters
    ----------
    j : SpinQuantumNumber

    Returns
    -------
    AngularMomentumSet
    """
    if not isinstance(j, SpinQuantumNumber):
        raise TypeError("j must be a SpinQuantumNumber")
    jj = j.j
    m = j.m_values()
    ladder = np.sqrt(jj * (jj + 1.0) - m[:-1] * (m[:-1] + 1.0))
    jplus = np.zeros((j.dim, j.dim))
    jplus[np.arange(1, j.dim), np.arange(j.dim - 1)] = ladder
    jx = 0.5 * (jplus + jplus.T)
    jy = -0.5j * (jplus - jplus.T)
    jz = np.diag(m)
    jz2 = np.diag(m * m)
    return AngularMomentumSet(
        j=j, jx=readonly(jx), jy=readonly(jy), jz=readonly(jz), jz2=readonly(jz2)
    )


def _dicke_index(j: SpinQuantumNumber, m: float) -> int:
    twice_m = round(2.0 * m)
    if abs(2.0 * m - twice_m) > 1e-9:
        raise ValueError(f"m must be integer or half-integer, got {m}")
    if (twice_m + j.twice_j) % 2 != 0:
        raise ValueError(f"m = {m} has the wrong parity for j = {j.j}")
    if abs(twice_m) > j.twice_j:
        raise ValueError(f"m = {m} lies outside [-j, +j] for j = {j.j}")
    return (twice_m + j.twice_j) // 2


def dicke_state(j: SpinQuantumNumber, m: float) -> StateVector:
    """The basis state |j, m>: a single unit amplitude at index m + j."""
    index = _dicke_index(j, m)
    amplitudes = np.zeros(j.dim, dtype=np.complex128)
    amplitudes[index] = 1.0
    return StateVector(amplitudes, j)


def _log_binomial(n: int, k: int) -> float:
    # math.comb is exact and math.log of a big int loses only ~1 ulp, which
    # keeps amplitudes accurate to ~1e-14 relative even at N = 500.
    return math.log(math.comb(n, k))


def spin_coherent_state(j: SpinQuantumNumber, theta: float, phi: float) -> StateVector:
    """Spin coherent state at polar angles (theta, phi).

    theta = 0 gives the lowest-weight state |j, -j> and theta = pi the
    highest-weight state |j, +j> (handled as explicit limits; the generic
    amplitude formula is singular at theta = pi). Amplitude magnitudes are
    evaluated in log space so large N never overflows.

    Parameters
    ----------
    j : SpinQuantumNumber
    theta : float
        Polar angle in [0, pi].
    phi : float
        Azimuthal angle in radians (2*pi periodic).

    Returns
    -------
    StateVector
    """
    if not (math.isfinite(theta) and 0.0 <= theta <= math.pi):
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    if not math.isfinite(phi):
        raise ValueError(f"phi must be finite, got {phi}")
    if theta == 0.0:
        return dicke_state(j, -j.j)
    if theta == math.pi:
        return dicke_state(j, j.j)

    n = j.twice_j
    k = np.arange(n + 1, dtype=float)
    log_tan = math.log(math.tan(0.5 * theta))
    log_binom = np.array([_log_binomial(n, kk) for kk in range(n + 1)])
    # log(1 + tan^2) via logaddexp stays finite for theta arbitrarily close to pi
    log_norm = j.j * np.logaddexp(0.0, 2.0 * log_tan)
    log_mag = 0.5 * log_binom + k * log_tan - log_norm
    amplitudes = np.exp(log_mag - 1j * phi * k)
    return StateVector(amplitudes, j)


def _check_match(ops: AngularMomentumSet, state: StateVector) -> None:
    if ops.j != state.j:
        raise ValueError(
            f"operator set (2j = {ops.j.twice_j}) does not match state (2j = {state.j.twice_j})"
        )


def expectation(ops: AngularMomentumSet, state: StateVector) -> np.ndarray:
    """Expectation values (<jx>, <jy>, <jz>) of a pure state.

    The imaginary residues must stay below ``IMAG_RESIDUE_TOL``; they are
    checked and then discarded.
    """
    _check_match(ops, state)
    psi = state.amplitudes
    values = np.array([np.vdot(psi, op @ psi) for op in (ops.jx, ops.jy, ops.jz)])
    residue = float(np.max(np.abs(values.imag)))
    if residue > IMAG_RESIDUE_TOL:
        raise ValueError(f"imaginary residue {residue!r} on an expectation value")
    return values.real


def symmetrized_second_moments(ops: AngularMomentumSet, state: StateVector) -> np.ndarray:
    """3x3 matrix of symmetrized second moments, entry (k, l) = <{J_k, J_l}> / 2.

    Symmetric and real by construction; its trace equals j(j+1).
    """
    _check_match(ops, state)
    psi = state.amplitudes
    jpsi = [op @ psi for op in (ops.jx, ops.jy, ops.jz)]
    moments = np.empty((3, 3))
    for a in range(3):
        for b in range(a, 3):
            moments[a, b] = moments[b, a] = float(np.vdot(jpsi[a], jpsi[b]).real)
    return moments
