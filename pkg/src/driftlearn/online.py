"""Widrow-Hoff (LMS) online learning and exact regret computation.

The base learner processes a sample sequentially: at step t it predicts
with the current hypothesis, records the loss, then applies the LMS update
w <- w + eta_t (y - w.x) x followed by projection onto the norm ball. The
classical gradient factor 2 is absorbed into eta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._lstsq import constrained_least_squares
from .core import (
    DEFAULT_NORM_BOUND,
    InvalidInputError,
    LabeledExample,
    LinearHypothesis,
    Loss,
    NumericError,
    Sample,
)

DEFAULT_ETA0 = 0.1


@dataclass(frozen=True)
class OnlineConfig:
    """Step-size schedule, norm ball, and recorded loss for the learner.

    schedule 'decaying' uses eta_t = eta0 / sqrt(t) (t = 1, 2, ...);
    'constant' keeps eta_t = eta0 throughout.
    """

    loss: Loss = field(default_factory=Loss)
    norm_bound: float = DEFAULT_NORM_BOUND
    eta0: float = DEFAULT_ETA0
    schedule: str = "decaying"

    def __post_init__(self) -> None:
        if self.schedule not in ("decaying", "constant"):
            raise InvalidInputError(f"unknown schedule {self.schedule!r}")
        if not (np.isfinite(self.eta0) and self.eta0 > 0):
            raise InvalidInputError("eta0 must be finite and > 0")

    def step_sizes(self, T: int) -> np.ndarray:
        if self.schedule == "constant":
            return np.full(T, self.eta0)
        return self.eta0 / np.sqrt(np.arange(1, T + 1, dtype=np.float64))


@dataclass(frozen=True)
class LearnerState:
    """Current hypothesis of the online learner after ``t`` updates."""

    hypothesis: LinearHypothesis
    config: OnlineConfig = field(default_factory=OnlineConfig)
    t: int = 0

    def __post_init__(self) -> None:
        if self.t < 0:
            raise InvalidInputError("step index must be >= 0")


def widrow_hoff_step(state: LearnerState, example: LabeledExample) -> LearnerState:
    """One LMS update followed by projection onto the norm ball."""
    w = state.hypothesis.weights
    if example.x.shape != w.shape:
        raise InvalidInputError("feature dimension does not match hypothesis")
    cfg = state.config
    t_next = state.t + 1
    eta = cfg.eta0 if cfg.schedule == "constant" else cfg.eta0 / np.sqrt(t_next)
    residual = example.y - float(w @ example.x)
    new_w = w + eta * residual * example.x
    if not np.all(np.isfinite(new_w)):
        raise NumericError("weight update overflowed; lower the step size")
    return LearnerState(
        LinearHypothesis(new_w, state.hypothesis.norm_bound), cfg, t_next
    )


@dataclass(frozen=True)
class Trace:
    """Hypotheses h_1..h_T (each *before* seeing example t) and their losses.

    ``weight_rows`` stacks the hypothesis weight vectors as rows; ``losses``
    holds the configured loss of h_t on example t, recorded before the
    update. ``raw_predictions`` keeps the unclipped predictions so raw and
    clipped errors can both be reported.
    """

    weight_rows: np.ndarray
    losses: np.ndarray
    raw_predictions: np.ndarray
    norm_bound: float

    def __len__(self) -> int:
        return self.weight_rows.shape[0]

    def hypotheses(self) -> list[LinearHypothesis]:
        return [
            LinearHypothesis(row, self.norm_bound) for row in self.weight_rows
        ]

    def hypothesis(self, t: int) -> LinearHypothesis:
        """h_t for t in 1..T (the hypothesis before example t)."""
        return LinearHypothesis(self.weight_rows[t - 1], self.norm_bound)

    def final_weights(self) -> np.ndarray:
        return self.weight_rows[-1] if len(self) else np.zeros(0)


def run_online(sample: Sample, config: OnlineConfig | None = None) -> Trace:
    """Process a sample sequentially from the zero hypothesis.

    Pure function of (sample, config); independent runs can execute
    concurrently.
    """
    cfg = config if config is not None else OnlineConfig()
    T, d = sample.X.shape
    if T == 0:
        return Trace(np.zeros((0, d)), np.zeros(0), np.zeros(0), cfg.norm_bound)
    eta = cfg.step_sizes(T)
    W, preds = _kernels.widrow_hoff_trace(
        sample.X, sample.y, eta, float(cfg.norm_bound)
    )
    if not (np.all(np.isfinite(W)) and np.all(np.isfinite(preds))):
        raise NumericError("online run overflowed; lower the step size")
    losses = cfg.loss.evaluate_array(preds, sample.y)
    return Trace(W[:-1], losses, preds, cfg.norm_bound)


def best_fixed_hypothesis(
    sample: Sample, norm_bound: float = DEFAULT_NORM_BOUND
) -> LinearHypothesis:
    """The norm-ball-constrained least-squares comparator for a sample."""
    w = constrained_least_squares(sample.X, sample.y, norm_bound)
    return LinearHypothesis(w, norm_bound)


def regret(
    trace: Trace,
    sample: Sample,
    loss: Loss | None = None,
    norm_bound: float | None = None,
) -> float:
    """Cumulative online loss minus the best fixed hypothesis in the ball.

    The comparator minimizes the raw (unclipped) squared error exactly via
    norm-constrained least squares, then its per-step losses are evaluated
    with the configured loss, matching how the trace losses were recorded.
    """
    if len(trace) != len(sample):
        raise InvalidInputError("trace and sample lengths differ")
    loss = loss if loss is not None else Loss()
    bound = norm_bound if norm_bound is not None else trace.norm_bound
    if len(sample) == 0:
        return 0.0
    comparator = best_fixed_hypothesis(sample, bound)
    comp_losses = loss.evaluate_array(sample.X @ comparator.weights, sample.y)
    return float(np.sum(trace.losses) - np.sum(comp_losses))
