"""Memory-aware dynamic mode decomposition.

Fits one-step transition operators to partially observed dynamics three
ways: the plain least-squares fit, a memory-aware objective derived from a
discretized memory-kernel recursion, and its cheaper first-order-in-time
approximation.  Ensembles over random memory initializations yield averaged
spectra, reconstructed expected dynamics, and empirical variance estimates;
a coupled-oscillator benchmark and a CLI pipeline tie it together.
"""

from .config import ExperimentConfig, default_config, parse_config
from .ensemble import (
    EnsembleResult,
    MatchingDegeneracyWarning,
    SpectralModel,
    ensemble_variance,
    fit_ensemble,
    match_and_average,
    reconstruct,
    run_ensemble,
)
from .errors import (
    ConfigError,
    DivergenceError,
    EnsembleError,
    NumericalError,
    SingularMatrixError,
)
from .harness import (
    MethodFailure,
    RunReport,
    dmd_spectral_model,
    read_csv,
    run_experiment,
    simulate_measurement,
    write_csv,
)
from .linalg import (
    EigDecomposition,
    eig,
    expm,
    expm_frechet,
    matpow,
    phase_normalize,
    pinv,
    solve,
)
from .objectives import (
    MZ_DMD,
    OBJECTIVE_KINDS,
    PLAIN_DMD,
    T_MODEL,
    MemoryInit,
    Objective,
    SnapshotPair,
    cayley_M,
    dmd_fit,
    fd_gradient,
    memory_kernel_closed,
    memory_kernel_trapezoid,
    mz_memory_matrix,
    objective_gradient,
    objective_value,
    objective_value_and_gradient,
    tmodel_memory_matrix,
)
from .optim import AdamConfig, OptState, adam_step, fit_transition
from .oscillator import (
    SimConfig,
    Trajectory,
    hamiltonian,
    integrate,
    measure,
    monte_carlo_projection,
    oscillator_rhs,
    rng_stream,
    sample_unresolved,
)
from .plots import emit_plot

__version__ = "0.1.0"

__all__ = [
    "AdamConfig",
    "ConfigError",
    "DivergenceError",
    "EigDecomposition",
    "EnsembleError",
    "EnsembleResult",
    "ExperimentConfig",
    "MatchingDegeneracyWarning",
    "MemoryInit",
    "MethodFailure",
    "MZ_DMD",
    "NumericalError",
    "OBJECTIVE_KINDS",
    "Objective",
    "OptState",
    "PLAIN_DMD",
    "RunReport",
    "SimConfig",
    "SingularMatrixError",
    "SnapshotPair",
    "SpectralModel",
    "T_MODEL",
    "Trajectory",
    "adam_step",
    "cayley_M",
    "default_config",
    "dmd_fit",
    "dmd_spectral_model",
    "eig",
    "emit_plot",
    "ensemble_variance",
    "expm",
    "expm_frechet",
    "fd_gradient",
    "fit_ensemble",
    "fit_transition",
    "hamiltonian",
    "integrate",
    "match_and_average",
    "matpow",
    "measure",
    "memory_kernel_closed",
    "memory_kernel_trapezoid",
    "monte_carlo_projection",
    "mz_memory_matrix",
    "objective_gradient",
    "objective_value",
    "objective_value_and_gradient",
    "oscillator_rhs",
    "parse_config",
    "phase_normalize",
    "pinv",
    "read_csv",
    "reconstruct",
    "rng_stream",
    "run_ensemble",
    "run_experiment",
    "sample_unresolved",
    "simulate_measurement",
    "solve",
    "tmodel_memory_matrix",
    "write_csv",
]
