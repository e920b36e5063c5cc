"""Discrepancy-weighted learning under drifting distributions.

A library and CLI for: estimating the discrepancy between drifting
distributions (closed-form spectral estimator for the squared-loss linear
class, plus exact grid-based oracles), combining the trace of an online
learner into a single hypothesis through a simplex-constrained QP,
truncated-window ERM with the bound-optimal window, and a reproducible
synthetic-drift experiment harness.
"""

from ._kernels import USING_NUMBA
from .core import (
    DEFAULT_LOSS_CLIP,
    DEFAULT_NORM_BOUND,
    InvalidInputError,
    LabeledExample,
    LinearHypothesis,
    Loss,
    NumericError,
    RngState,
    Sample,
    derive_seed,
    evaluate_loss,
    predict,
    splitmix64,
)
from .discrepancy import (
    DiscrepancyProfile,
    GridDistribution,
    MomentMatrix,
    analytic_gaussian_moments,
    empirical_moments,
    l1_distance,
    rectangle_example,
    spectral_discrepancy,
    spectral_norm_symmetric,
    threshold_discrepancy,
)
from .drift import ConstantDriftConfig, DriftConfig, generate_drift
from .erm import (
    TrackingResult,
    WindowConfig,
    append_tracking_csv,
    optimal_window,
    pac_bound,
    tracking_csv_rows,
    tracking_run,
    truncated_erm,
)
from .harness import (
    ExperimentRow,
    TrialOutcome,
    bound_trial,
    experiment_csv,
    run_experiment,
    run_trial,
    tracking_sweep,
)
from .online import (
    LearnerState,
    OnlineConfig,
    Trace,
    best_fixed_hypothesis,
    regret,
    run_online,
    widrow_hoff_step,
)
from .weights import (
    BoundReport,
    QPInstance,
    SimplexWeights,
    bound_report,
    combine,
    generalization_bound,
    project_simplex,
    solve_weights,
)

__version__ = "0.1.0"

__all__ = [
    "USING_NUMBA",
    "DEFAULT_LOSS_CLIP",
    "DEFAULT_NORM_BOUND",
    "InvalidInputError",
    "NumericError",
    "LabeledExample",
    "Sample",
    "LinearHypothesis",
    "Loss",
    "RngState",
    "splitmix64",
    "derive_seed",
    "evaluate_loss",
    "predict",
    "LearnerState",
    "OnlineConfig",
    "Trace",
    "widrow_hoff_step",
    "run_online",
    "regret",
    "best_fixed_hypothesis",
    "MomentMatrix",
    "DiscrepancyProfile",
    "GridDistribution",
    "spectral_discrepancy",
    "spectral_norm_symmetric",
    "empirical_moments",
    "analytic_gaussian_moments",
    "threshold_discrepancy",
    "l1_distance",
    "rectangle_example",
    "SimplexWeights",
    "QPInstance",
    "BoundReport",
    "project_simplex",
    "solve_weights",
    "combine",
    "bound_report",
    "generalization_bound",
    "WindowConfig",
    "TrackingResult",
    "truncated_erm",
    "optimal_window",
    "pac_bound",
    "tracking_run",
    "tracking_csv_rows",
    "append_tracking_csv",
    "DriftConfig",
    "ConstantDriftConfig",
    "generate_drift",
    "ExperimentRow",
    "TrialOutcome",
    "run_trial",
    "bound_trial",
    "run_experiment",
    "experiment_csv",
    "tracking_sweep",
]
