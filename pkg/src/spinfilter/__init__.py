"""Simulation of continuously monitored spin systems with estimate feedback.

The package integrates the coupled pair of stochastic master equations for
the actual state rho and the filter state rho_hat driven by one shared
Wiener process, applies a feedback Hamiltonian computed from the filter,
and provides ensemble statistics, convergence-rate fits, and hypothesis
tests for the stabilization claims.
"""

from .backend import active_backend, available_backends, set_backend
from .config import IntegratorConfig, SimConfig, StateSpec, parse_config, serialize_config
from .control import Controller, evaluate, signed_power
from .dynamics import (
    CoupledState,
    PhysicalParams,
    bloch_diffusion,
    bloch_drift,
    coupled_drift,
    diffusion_term,
    hamiltonian_term,
    lindblad_term,
    observation_increment,
)
from .ensemble import (
    EnsembleStats,
    QndReport,
    RateFit,
    SubmartingaleReport,
    fit_rate,
    qnd_convergence_test,
    run_ensemble,
    submartingale_test,
)
from .errors import (
    ConfigError,
    DimensionError,
    EnsembleError,
    InsufficientDataError,
    IntegrationDivergedError,
    SingularStateError,
    SpinFilterError,
    StateError,
)
from .metrics import (
    bures_coupled,
    bures_distance,
    fidelity_bloch,
    fidelity_general,
    fidelity_qubit,
    generator_fidelity_qubit,
    jz_expectation,
    lyapunov_v0,
    lyapunov_v1,
    purity_deficit,
    purity_drift_qubit,
)
from .operators import (
    SpinOperators,
    basis_projector,
    bloch_to_density,
    check_density_matrix,
    density_to_bloch,
    make_sigma_operators,
    make_spin_operators,
    maximally_mixed,
)
from .sde import (
    BlochTrajectory,
    Trajectory,
    WienerPath,
    generate_wiener,
    project_to_physical,
    simulate,
    simulate_bloch,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "BlochTrajectory",
    "ConfigError",
    "Controller",
    "CoupledState",
    "DimensionError",
    "EnsembleError",
    "EnsembleStats",
    "InsufficientDataError",
    "IntegrationDivergedError",
    "IntegratorConfig",
    "PhysicalParams",
    "QndReport",
    "RateFit",
    "SimConfig",
    "SingularStateError",
    "SpinFilterError",
    "SpinOperators",
    "StateError",
    "StateSpec",
    "SubmartingaleReport",
    "Trajectory",
    "WienerPath",
    "active_backend",
    "available_backends",
    "basis_projector",
    "bloch_diffusion",
    "bloch_drift",
    "bloch_to_density",
    "bures_coupled",
    "bures_distance",
    "check_density_matrix",
    "coupled_drift",
    "density_to_bloch",
    "diffusion_term",
    "evaluate",
    "fidelity_bloch",
    "fidelity_general",
    "fidelity_qubit",
    "fit_rate",
    "generate_wiener",
    "generator_fidelity_qubit",
    "hamiltonian_term",
    "jz_expectation",
    "lindblad_term",
    "lyapunov_v0",
    "lyapunov_v1",
    "make_sigma_operators",
    "make_spin_operators",
    "maximally_mixed",
    "observation_increment",
    "parse_config",
    "project_to_physical",
    "purity_deficit",
    "purity_drift_qubit",
    "qnd_convergence_test",
    "run_ensemble",
    "serialize_config",
    "set_backend",
    "signed_power",
    "simulate",
    "simulate_bloch",
    "step",
    "submartingale_test",
]
