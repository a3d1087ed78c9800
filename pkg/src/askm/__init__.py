"""Sampling Kaczmarz-Motzkin solvers for linear feasibility ``Ax <= b``, with acceleration."""

from .core import (
    EstimationMethod,
    LFProblem,
    ResidualStats,
    SpectralConstants,
    estimate_spectral,
    load_problem,
    normalize_system,
    positive_residual,
    save_problem,
    weighted_norm_sq,
)
from .errors import (
    BadSampleSize,
    DegenerateLambda,
    DimensionMismatch,
    LFError,
    NonFiniteParameter,
    ParseError,
    PreconditionViolated,
    RankDeficient,
    ScheduleInvariantError,
    TooManySubsets,
    Unsupported,
    ZeroRow,
)
from .problems import (
    GeneratorKind,
    GeneratorSpec,
    LPInstance,
    far_start,
    generate_random,
    labeled_data_to_homogeneous,
    lp_to_lf,
)
from .mps import parse_mps_subset, read_mps
from .sampling import (
    RowSampler,
    draw_sample,
    enumeration_oracle,
    expected_selected_residual_sq,
    make_rng,
    select_max_violation,
)
from .solvers import HaltingRule, Method, RunReport, SolverConfig, askm_step, init_state, run, skm_step
from .theory import (
    AskmSchedule,
    ConvergenceBound,
    ScheduleConstants,
    advance_gamma,
    check_schedule,
    lambda_zero_limit_bound,
    theorem1_bounds,
)

__all__ = [
    "AskmSchedule",
    "BadSampleSize",
    "ConvergenceBound",
    "DegenerateLambda",
    "DimensionMismatch",
    "EstimationMethod",
    "GeneratorKind",
    "GeneratorSpec",
    "HaltingRule",
    "LFError",
    "LFProblem",
    "LPInstance",
    "Method",
    "NonFiniteParameter",
    "ParseError",
    "PreconditionViolated",
    "RankDeficient",
    "ResidualStats",
    "RowSampler",
    "RunReport",
    "ScheduleConstants",
    "ScheduleInvariantError",
    "SolverConfig",
    "SpectralConstants",
    "TooManySubsets",
    "Unsupported",
    "ZeroRow",
    "advance_gamma",
    "askm_step",
    "check_schedule",
    "draw_sample",
    "enumeration_oracle",
    "estimate_spectral",
    "expected_selected_residual_sq",
    "far_start",
    "generate_random",
    "init_state",
    "labeled_data_to_homogeneous",
    "lambda_zero_limit_bound",
    "load_problem",
    "lp_to_lf",
    "make_rng",
    "normalize_system",
    "parse_mps_subset",
    "positive_residual",
    "read_mps",
    "run",
    "save_problem",
    "select_max_violation",
    "skm_step",
    "theorem1_bounds",
    "weighted_norm_sq",
]
