"""Implicit robust exact differentiators of arbitrary order."""

from .analysis import (
    DividedDifferenceTable,
    IndexOutOfWindow,
    LyapunovEvaluator,
    divided_differences,
    error_states,
    in_invariant_set,
    lyapunov,
)
from .core import (
    CoefficientTable,
    DifferentiatorConfig,
    DifferentiatorState,
    StepOutput,
    compute_coefficients,
    signed_power,
    signed_power_zero,
)
from .differentiators import (
    FilteringIred,
    Hidd1,
    IhddFamily,
    Ired,
    Istd,
    ResidualCheckFailed,
    init_from_derivatives,
)
from .resolvent import IterationLimitExceeded, ResolventProblem, solve_resolvent
from .sim import NoiseModel, RunRecord, SignalModel, SimulationError, Sinusoid, convergence_step, run
from .tuning import (
    GainReport,
    InvalidTuningParameter,
    TuningConstants,
    check_gain_conditions,
    compute_constants,
    exactness_bound,
    noisy_bound,
    tune_gains,
)

__all__ = [
    "check_gain_conditions",
    "CoefficientTable",
    "compute_coefficients",
    "compute_constants",
    "convergence_step",
    "DifferentiatorConfig",
    "DifferentiatorState",
    "divided_differences",
    "DividedDifferenceTable",
    "error_states",
    "exactness_bound",
    "FilteringIred",
    "GainReport",
    "Hidd1",
    "IhddFamily",
    "in_invariant_set",
    "IndexOutOfWindow",
    "init_from_derivatives",
    "InvalidTuningParameter",
    "Ired",
    "Istd",
    "IterationLimitExceeded",
    "lyapunov",
    "LyapunovEvaluator",
    "NoiseModel",
    "noisy_bound",
    "ResidualCheckFailed",
    "ResolventProblem",
    "run",
    "RunRecord",
    "SignalModel",
    "signed_power",
    "signed_power_zero",
    "SimulationError",
    "Sinusoid",
    "solve_resolvent",
    "StepOutput",
    "tune_gains",
    "TuningConstants",
]
