"""Mean-field limit of the double well on the phase cylinder (p, phi).

p = -cos(theta) is the canonical momentum (population imbalance per particle)
and phi the relative phase between the wells. Time is measured in units of
1/kappa_r with kappa_r = (N - 1) kappa, which leaves lambda = Omega / kappa_r
as the only parameter. In these units the Hamiltonian reads

    H(p, phi) = lambda * sqrt(1 - p^2) * cos(phi) + p^2

and the canonical equations are dp/dt = -dH/dphi, dphi/dt = +dH/dp. The
chart is singular at the poles |p| = 1, where dphi/dt diverges.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .spin import readonly

__all__ = [
    "ClassicalParams",
    "PhaseState",
    "Stability",
    "Regime",
    "FixedPointReport",
    "Trajectory",
    "PoleSingularityError",
    "classical_hamiltonian",
    "equations_of_motion",
    "linearize",
    "find_fixed_points",
    "integrate_trajectory",
    "self_trapping_margin",
    "self_trapping_critical_omega",
]

TWO_PI = 2.0 * math.pi

# pole guard of the equations of motion themselves
POLE_EOM_MARGIN = 1e-12
# pole guard applied to every integrator stage (step rejected beyond it)
POLE_STEP_MARGIN = 1e-9
# initial conditions must keep this distance from the poles
POLE_START_MARGIN = 1e-6
# branch fixed points this close to a pole sit in the singular collar and are dropped
BRANCH_POLE_MARGIN = 2e-6
# |lambda - 2| below this counts as sitting on the bifurcation
BIFURCATION_TOL = 1e-12
# sign tolerance for classifying the squared linearization eigenvalue
STABILITY_TOL = 1e-9
# relative energy drift allowed before a run is flagged step_too_large
ENERGY_DRIFT_TOL = 1e-8


class PoleSingularityError(ValueError):
    """Raised when the dynamics reaches the singular poles |p| = 1.

    When raised by the integrator, ``trajectory`` holds the part of the
    trajectory computed before the rejected step.
    """

    def __init__(self, message: str, trajectory: "Trajectory | None" = None):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class ClassicalParams:
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError(f"lambda must be finite and nonnegative, got {self.lam}")
        object.__setattr__(self, "lam", float(self.lam))


@dataclass(frozen=True)
class PhaseState:
    """A point on the phase cylinder; |p| <= 1, phi in radians (2 pi periodic)."""

    p: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and abs(self.p) <= 1.0):
            raise ValueError(f"momentum must satisfy |p| <= 1, got {self.p}")
        if not math.isfinite(self.phi):
            raise ValueError(f"phi must be finite, got {self.phi}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "phi", float(self.phi))


class Stability(enum.Enum):
    STABLE_CENTER = "stable_center"
    UNSTABLE_SADDLE = "unstable_saddle"
    MARGINAL = "marginal"


class Regime(enum.Enum):
    ABOVE_BIFURCATION = "above_bifurcation"
    BELOW_BIFURCATION = "below_bifurcation"
    AT_BIFURCATION = "at_bifurcation"


@dataclass(frozen=True)
class FixedPointReport:
    location: PhaseState
    theta_equivalent: float
    jacobian: np.ndarray
    eigenvalue_squared: float
    stability: Stability
    regime: Regime


@dataclass(frozen=True)
class Trajectory:
    """Sampled classical trajectory; phi is reported mod 2 pi.

    ``status`` is "ok" when the energy drift stayed within the integrator
    contract and "step_too_large" otherwise; trajectories recovered from a
    PoleSingularityError carry "pole_truncated".
    """

    t: np.ndarray
    p: np.ndarray
    phi: np.ndarray
    energy: np.ndarray
    status: str
    max_energy_drift: float


def classical_hamiltonian(s: PhaseState, params: ClassicalParams) -> float:
    """Rescaled mean-field energy lambda sqrt(1 - p^2) cos(phi) + p^2."""
    return params.lam * math.sqrt(1.0 - s.p * s.p) * math.cos(s.phi) + s.p * s.p


def equations_of_motion(s: PhaseState, params: ClassicalParams) -> tuple[float, float]:
    """Canonical velocities (dp/dt, dphi/dt) in units of kappa_r.

    Raises PoleSingularityError within ``POLE_EOM_MARGIN`` of the poles, where
    dphi/dt diverges.
    """
    p, phi = s.p, s.phi
    if abs(p) >= 1.0 - POLE_EOM_MARGIN:
        raise PoleSingularityError(f"equations of motion are singular at |p| = {abs(p)!r}")
    root = math.sqrt(1.0 - p * p)
    dp = params.lam * root * math.sin(phi)
    dphi = 2.0 * p - params.lam * p * math.cos(phi) / root
    return dp, dphi


def linearize(s: PhaseState, params: ClassicalParams) -> np.ndarray:
    """Jacobian of the flow, [[-H_pphi, -H_phiphi], [H_pp, H_pphi]].

    Second derivatives of the Hamiltonian are hard-coded analytic
    expressions; the matrix is trace-free.
    """
    p, phi = s.p, s.phi
    if abs(p) >= 1.0 - POLE_EOM_MARGIN:
        raise PoleSingularityError(f"linearization is singular at |p| = {abs(p)!r}")
    lam = params.lam
    root = math.sqrt(1.0 - p * p)
    h_pphi = lam * p * math.sin(phi) / root
    h_phiphi = -lam * root * math.cos(phi)
    h_pp = 2.0 - lam * math.cos(phi) / root**3
    return np.array([[-h_pphi, -h_phiphi], [h_pp, h_pphi]])


def _classify(eigenvalue_squared: float) -> Stability:
    if eigenvalue_squared < -STABILITY_TOL:
        return Stability.STABLE_CENTER
    if eigenvalue_squared > STABILITY_TOL:
        return Stability.UNSTABLE_SADDLE
    return Stability.MARGINAL


def _report(p: float, phi: float, params: ClassicalParams, regime: Regime) -> FixedPointReport:
    location = PhaseState(p, phi)
    jac = linearize(location, params)
    # trace-free 2x2: eigenvalues come in a pair +/- lambda with lambda^2 = -det
    lam_sq = float(jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0])
    lam_sq = -lam_sq
    return FixedPointReport(
        location=location,
        theta_equivalent=math.acos(-p),
        jacobian=readonly(jac),
        eigenvalue_squared=lam_sq,
        stability=_classify(lam_sq),
        regime=regime,
    )


def find_fixed_points(params: ClassicalParams) -> list[FixedPointReport]:
    """All fixed points of the flow with their linear stability.

    (0, 0) and (0, pi) always exist. Below the bifurcation at lambda = 2 a
    pair at (+/- sqrt(1 - (lambda/2)^2), 0) appears; the pair is suppressed
    when it falls inside the singular collar around the poles (lambda below
    about 3e-3, including lambda = 0), where the chart itself breaks down.
    """
    lam = params.lam
    if abs(lam - 2.0) <= BIFURCATION_TOL:
        regime = Regime.AT_BIFURCATION
    elif lam > 2.0:
        regime = Regime.ABOVE_BIFURCATION
    else:
        regime = Regime.BELOW_BIFURCATION

    reports = [_report(0.0, 0.0, params, regime), _report(0.0, math.pi, params, regime)]
    if regime is Regime.BELOW_BIFURCATION:
        p_branch = math.sqrt(1.0 - (0.5 * lam) ** 2)
        if p_branch <= 1.0 - BRANCH_POLE_MARGIN:
            reports.append(_report(p_branch, 0.0, params, regime))
            reports.append(_report(-p_branch, 0.0, params, regime))
    return reports


def integrate_trajectory(
    s0: PhaseState,
    params: ClassicalParams,
    t_end: float,
    dt: float = 1e-3,
) -> Trajectory:
    """Classical fourth-order Runge-Kutta trajectory from s0 over [0, t_end].

    Every stage is guarded against the poles; a step that would reach
    |p| >= 1 - 1e-9 is rejected and surfaces as a PoleSingularityError whose
    ``trajectory`` attribute holds the part integrated so far. The returned
    status records whether the energy drift met the integrator contract.
    """
    if not (math.isfinite(t_end) and t_end > 0.0):
        raise ValueError(f"t_end must be positive, got {t_end}")
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be positive, got {dt}")
    if abs(s0.p) > 1.0 - POLE_START_MARGIN:
        raise ValueError(
            f"initial condition within {POLE_START_MARGIN} of a pole: p = {s0.p}"
        )

    lam = params.lam
    sin, cos, sqrt = math.sin, math.cos, math.sqrt

    def rhs(p: float, phi: float) -> tuple[float, float]:
        if abs(p) >= 1.0 - POLE_STEP_MARGIN:
            raise PoleSingularityError(f"trajectory reached |p| = {abs(p)!r}")
        root = sqrt(1.0 - p * p)
        return lam * root * sin(phi), 2.0 * p - lam * p * cos(phi) / root

    def energy(p: float, phi: float) -> float:
        return lam * sqrt(1.0 - p * p) * cos(phi) + p * p

    n_full = int(t_end / dt)
    remainder = t_end - n_full * dt
    steps = [dt] * n_full
    if remainder > 1e-12:
        steps.append(remainder)

    n_records = len(steps) + 1
    t_arr = np.empty(n_records)
    p_arr = np.empty(n_records)
    phi_arr = np.empty(n_records)
    h_arr = np.empty(n_records)

    p, phi = s0.p, s0.phi
    t = 0.0
    t_arr[0], p_arr[0], phi_arr[0], h_arr[0] = t, p, phi, energy(p, phi)

    filled = 1
    try:
        for i, h in enumerate(steps):
            k1p, k1f = rhs(p, phi)
            k2p, k2f = rhs(p + 0.5 * h * k1p, phi + 0.5 * h * k1f)
            k3p, k3f = rhs(p + 0.5 * h * k2p, phi + 0.5 * h * k2f)
            k4p, k4f = rhs(p + h * k3p, phi + h * k3f)
            p_new = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            phi_new = phi + (h / 6.0) * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
            if abs(p_new) >= 1.0 - POLE_STEP_MARGIN:
                raise PoleSingularityError(f"trajectory reached |p| = {abs(p_new)!r}")
            p, phi = p_new, phi_new
            t = t + h
            t_arr[filled], p_arr[filled], phi_arr[filled] = t, p, phi
            h_arr[filled] = energy(p, phi)
            filled += 1
    except PoleSingularityError as exc:
        partial = _finish(t_arr[:filled], p_arr[:filled], phi_arr[:filled], h_arr[:filled])
        raise PoleSingularityError(
            f"pole reached at t = {t_arr[filled - 1]!r}: {exc}",
            trajectory=Trajectory(
                t=partial.t,
                p=partial.p,
                phi=partial.phi,
                energy=partial.energy,
                status="pole_truncated",
                max_energy_drift=partial.max_energy_drift,
            ),
        ) from None

    return _finish(t_arr, p_arr, phi_arr, h_arr)


def _finish(t, p, phi, h) -> Trajectory:
    drift = float(np.max(np.abs(h - h[0])))
    status = "ok" if drift < ENERGY_DRIFT_TOL * max(1.0, abs(h[0])) else "step_too_large"
    return Trajectory(
        t=readonly(t),
        p=readonly(p),
        phi=readonly(np.mod(phi, TWO_PI)),
        energy=readonly(h),
        status=status,
        max_energy_drift=drift,
    )


def self_trapping_margin(theta0: float, phi0: float, lam: float) -> float:
    """Excess of the initial energy over the separatrix value.

    Positive means the trajectory started at (theta0, phi0) is self-trapped,
    negative means it undergoes symmetric population oscillations.
    """
    return lam * math.sin(theta0) * math.cos(phi0) + math.cos(theta0) ** 2 - lam


def self_trapping_critical_omega(theta0: float, phi0: float) -> float:
    """Critical lambda separating trapped from oscillating initial conditions.

    Returns cos(theta0)^2 / (1 - sin(theta0) cos(phi0)); lambda below the
    returned value traps, above it oscillates. At (theta0, phi0) = (pi/2, 0)
    numerator and denominator both vanish and the result is indeterminate,
    encoded as NaN.
    """
    if not (math.isfinite(theta0) and 0.0 <= theta0 <= math.pi):
        raise ValueError(f"theta0 must lie in [0, pi], got {theta0}")
    if not math.isfinite(phi0):
        raise ValueError(f"phi0 must be finite, got {phi0}")
    denominator = 1.0 - math.sin(theta0) * math.cos(phi0)
    if abs(denominator) <= 1e-12:
        return math.nan
    return math.cos(theta0) ** 2 / denominator
