"""Cost-optimal campaign planning for SIS and SIR information epidemics.

The package solves the Pontryagin boundary value problems of the
controlled mean-field models by shooting and by forward-backward sweeps,
evaluates heuristic and constant baseline strategies, sweeps parameters,
and validates the mean-field dynamics against a finite-population
stochastic simulation.
"""

from .profiles import Constant, Cosine, SigmoidDown, SigmoidUp, Tabulated, as_profile
from .integrator import (
    ControlGrid,
    IntegrationBlowupError,
    TimeGrid,
    Trajectory,
    default_n_steps,
    integrate_backward,
    integrate_forward,
    sample_control,
)
from .sis_model import SisParams, sis_adjoint_rhs, sis_cost, sis_optimal_control, sis_state_rhs
from .sir_model import (
    SirParams,
    sir_adjoint_rhs,
    sir_cost,
    sir_optimal_u1,
    sir_optimal_u2,
    sir_state_rhs,
)
from .solver import (
    METHOD_FBS,
    METHOD_SHOOTING,
    Solution,
    SolverNotConverged,
    SolverOptions,
    StationarityReport,
    UniquenessReport,
    shooting_residual,
    solve,
    solve_fbs,
    solve_shooting,
    uniqueness_probe,
    verify_stationarity,
)
from .strategies import STRATEGY_KINDS, Strategy, build_controls, evaluate_strategy
from .abm import AbmConfig, AbmResult, simulate, write_abm_csv
from .experiments import (
    SweepRow,
    SweepSpec,
    control_effort,
    export_trajectories,
    run_sweep,
    write_sweep_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Constant", "Cosine", "SigmoidDown", "SigmoidUp", "Tabulated", "as_profile",
    "ControlGrid", "IntegrationBlowupError", "TimeGrid", "Trajectory",
    "default_n_steps", "integrate_backward", "integrate_forward", "sample_control",
    "SisParams", "sis_adjoint_rhs", "sis_cost", "sis_optimal_control", "sis_state_rhs",
    "SirParams", "sir_adjoint_rhs", "sir_cost", "sir_optimal_u1", "sir_optimal_u2",
    "sir_state_rhs",
    "METHOD_FBS", "METHOD_SHOOTING", "Solution", "SolverNotConverged", "SolverOptions",
    "StationarityReport", "UniquenessReport", "shooting_residual", "solve", "solve_fbs",
    "solve_shooting", "uniqueness_probe", "verify_stationarity",
    "STRATEGY_KINDS", "Strategy", "build_controls", "evaluate_strategy",
    "AbmConfig", "AbmResult", "simulate", "write_abm_csv",
    "SweepRow", "SweepSpec", "control_effort", "export_trajectories", "run_sweep",
    "write_sweep_csv",
    "__version__",
]
