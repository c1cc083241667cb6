"""Double-well condensate toolkit.

Exact quantum dynamics of the two-mode model, maximal quantum Fisher
information tracking, and the classical mean-field phase-space picture
(fixed points, stability, bifurcation, and the transition from Josephson
oscillation to self-trapping).
"""

__version__ = "0.1.0"

from .spin import (
    AngularMomentumSet,
    SpinQuantumNumber,
    StateVector,
    build_operators,
    dicke_state,
    expectation,
    spin_coherent_state,
    symmetrized_second_moments,
)
from .dynamics import (
    ModelParams,
    ObservableSeries,
    Propagator,
    TwoModeHamiltonian,
    build_hamiltonian,
    coupling_only_hamiltonian,
    evolve,
    fidelity,
    observable_series,
)
from .qfi import (
    DensityOperator,
    QfiMatrix,
    cramer_rao_bound,
    max_mean_qfi,
    mixed_qfi_matrix,
    pure_qfi_matrix,
)
from .meanfield import (
    ClassicalParams,
    FixedPointReport,
    PhaseState,
    PoleSingularityError,
    Regime,
    Stability,
    Trajectory,
    classical_hamiltonian,
    equations_of_motion,
    find_fixed_points,
    integrate_trajectory,
    linearize,
    self_trapping_critical_omega,
    self_trapping_margin,
)
from .config import (
    ExperimentConfig,
    GridSpec,
    InitialState,
    TimeSpec,
    build_config,
    default_config,
    load_config_file,
)
from .experiments import (
    run_experiment,
    run_fidelity,
    run_jz_series,
    run_phase_portrait,
    run_qfi_map,
    run_sweep,
)

__all__ = [
    "__version__",
    # spin
    "SpinQuantumNumber",
    "AngularMomentumSet",
    "StateVector",
    "build_operators",
    "dicke_state",
    "spin_coherent_state",
    "expectation",
    "symmetrized_second_moments",
    # dynamics
    "ModelParams",
    "TwoModeHamiltonian",
    "Propagator",
    "ObservableSeries",
    "build_hamiltonian",
    "coupling_only_hamiltonian",
    "evolve",
    "fidelity",
    "observable_series",
    # qfi
    "DensityOperator",
    "QfiMatrix",
    "pure_qfi_matrix",
    "mixed_qfi_matrix",
    "max_mean_qfi",
    "cramer_rao_bound",
    # mean field
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
    # configuration and runners
    "ExperimentConfig",
    "GridSpec",
    "TimeSpec",
    "InitialState",
    "default_config",
    "load_config_file",
    "build_config",
    "run_experiment",
    "run_phase_portrait",
    "run_fidelity",
    "run_qfi_map",
    "run_jz_series",
    "run_sweep",
]
