"""Truncated-window empirical risk minimization and tracking simulation.

Fitting only the most recent m examples trades estimation error (shrinking
like sqrt(d/m)) against drift bias (growing like (m + 1) per-step
discrepancy); the window minimizing the resulting bound has a closed form,
implemented in :func:`optimal_window`. :func:`tracking_run` measures the
realized gap of the windowed fit against a near-optimal comparator by
simulation.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from ._lstsq import constrained_least_squares
from .core import (
    DEFAULT_NORM_BOUND,
    InvalidInputError,
    LinearHypothesis,
    RngState,
    Sample,
)
from .drift import ConstantDriftConfig, draw_labeled, generate_constant_drift

COMPARATOR_POINTS = 10_000
EVAL_POINTS = 2_000


@dataclass(frozen=True)
class WindowConfig:
    """Constants of the windowed learning bound.

    ``rademacher_const`` is the plug-in C with complexity(m) <= (C/4)
    sqrt(vc_dim/m); ``confidence_const`` is the companion constant
    C' = 2 M sqrt(log(2/confidence) / (2 vc_dim)) and is derived from the
    other fields when not supplied.
    """

    window_size: int
    vc_dim: float
    rademacher_const: float
    drift_bound: float
    confidence: float = 0.1
    loss_bound: float = 1.0
    confidence_const: float | None = None

    def __post_init__(self) -> None:
        if self.window_size < 1:
            raise InvalidInputError("window_size must be >= 1")
        if self.vc_dim <= 0 or self.rademacher_const < 0:
            raise InvalidInputError("vc_dim must be > 0 and constants nonnegative")
        if self.drift_bound < 0:
            raise InvalidInputError("drift_bound must be >= 0")
        if not (0.0 < self.confidence < 1.0):
            raise InvalidInputError("confidence must lie in (0, 1)")
        if self.loss_bound <= 0:
            raise InvalidInputError("loss_bound must be > 0")
        if self.confidence_const is None:
            derived = (
                2.0
                * self.loss_bound
                * math.sqrt(math.log(2.0 / self.confidence) / (2.0 * self.vc_dim))
            )
            object.__setattr__(self, "confidence_const", derived)
        elif self.confidence_const < 0:
            raise InvalidInputError("confidence_const must be >= 0")

    def with_window(self, m: int) -> "WindowConfig":
        return WindowConfig(
            m,
            self.vc_dim,
            self.rademacher_const,
            self.drift_bound,
            self.confidence,
            self.loss_bound,
            self.confidence_const,
        )


def truncated_erm(
    sample: Sample, m: int, norm_bound: float = DEFAULT_NORM_BOUND
) -> LinearHypothesis:
    """Constrained least-squares fit on the last m examples.

    Deterministic; degenerate normal equations are regularized by the fixed
    ridge jitter documented in :mod:`driftlearn._lstsq`. Only the window
    contents matter, so shifting the window start while keeping its contents
    fixed returns the same hypothesis.
    """
    T = len(sample)
    if not (1 <= m <= T):
        raise InvalidInputError(f"window size {m} is outside [1, {T}]")
    w = constrained_least_squares(sample.X[T - m :], sample.y[T - m :], norm_bound)
    return LinearHypothesis(w, norm_bound)


def optimal_window(cfg: WindowConfig, T: int) -> int:
    """Bound-minimizing window size, rounded to the nearest integer.

    Minimizes (C + C') sqrt(d/m) + (m + 1) drift over real m, giving
    m* = ((C + C')/2)^(2/3) (d / drift^2)^(1/3); ties round up and the
    result is clamped to [1, T]. Zero drift returns T (use everything).
    """
    if T < 1:
        raise InvalidInputError("T must be >= 1")
    if cfg.drift_bound == 0.0:
        return T
    total = cfg.rademacher_const + cfg.confidence_const
    m_real = (total / 2.0) ** (2.0 / 3.0) * (cfg.vc_dim / cfg.drift_bound**2) ** (
        1.0 / 3.0
    )
    m = int(math.floor(m_real + 0.5))
    return max(1, min(m, T))


def pac_bound(cfg: WindowConfig) -> float:
    """Windowed excess-loss bound with the complexity plug-in C sqrt(d/m).

    C sqrt(d/m) + (m + 1) drift + 2 M sqrt(log(2/confidence) / (2 m)).
    """
    m = cfg.window_size
    return (
        cfg.rademacher_const * math.sqrt(cfg.vc_dim / m)
        + (m + 1) * cfg.drift_bound
        + 2.0 * cfg.loss_bound * math.sqrt(math.log(2.0 / cfg.confidence) / (2.0 * m))
    )


@dataclass(frozen=True)
class TrackingResult:
    """Simulated tracking gap of windowed ERM at one drift level."""

    gap: float
    delta: float
    m: int
    T: int
    trials: int
    stderr: float
    seed: int

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise InvalidInputError("trials must be >= 1")
        if self.stderr < 0:
            raise InvalidInputError("stderr must be >= 0")


def tracking_run(
    cfg: ConstantDriftConfig,
    m: int,
    T: int,
    trials: int,
    rng: RngState,
    eval_points: int = EVAL_POINTS,
    comparator_points: int = COMPARATOR_POINTS,
) -> TrackingResult:
    """Estimate the next-step gap of windowed ERM over seeded trials.

    Each trial draws a fresh drift sequence, fits the window, and evaluates
    the clipped loss on fresh draws from the step-(T+1) distribution, paired
    against a comparator fit on ``comparator_points`` fresh labeled draws
    from that same distribution (a stand-in for the unavailable best-in-ball
    loss). Trials are independent computations keyed by (seed, trial index)
    and could run concurrently; aggregation uses numpy's pairwise summation,
    so totals do not depend on completion order.
    """
    if not (0 < m <= T):
        raise InvalidInputError("need 0 < m <= T")
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    gaps = np.empty(trials)
    for trial in range(trials):
        sub = rng.substream(trial)
        sample, mean_next, target_next = generate_constant_drift(cfg, T, sub)
        fitted = truncated_erm(sample, m, cfg.norm_bound)

        gen_eval = sub.substream(1).generator()
        comp_sample = draw_labeled(cfg, mean_next, target_next, comparator_points, gen_eval)
        comparator = LinearHypothesis(
            constrained_least_squares(comp_sample.X, comp_sample.y, cfg.norm_bound),
            cfg.norm_bound,
        )
        eval_sample = draw_labeled(cfg, mean_next, target_next, eval_points, gen_eval)
        fit_loss = cfg.loss.evaluate_array(
            eval_sample.X @ fitted.weights, eval_sample.y
        )
        comp_loss = cfg.loss.evaluate_array(
            eval_sample.X @ comparator.weights, eval_sample.y
        )
        gaps[trial] = float(np.mean(fit_loss - comp_loss))
    gap = float(np.mean(gaps))
    stderr = float(np.std(gaps, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return TrackingResult(gap, cfg.delta, m, T, trials, stderr, rng.seed)


TRACKING_CSV_HEADER = "delta,m,T,trials,gap,stderr,seed"


def tracking_csv_rows(results: list[TrackingResult]) -> str:
    lines = [TRACKING_CSV_HEADER]
    for r in results:
        lines.append(
            f"{r.delta!r},{r.m},{r.T},{r.trials},{r.gap!r},{r.stderr!r},{r.seed}"
        )
    return "\n".join(lines) + "\n"


def append_tracking_csv(path: str, results: list[TrackingResult]) -> None:
    """Append result rows, writing the header only when the file is new."""
    text = tracking_csv_rows(results)
    header, body = text.split("\n", 1)
    new_file = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        if new_file:
            fh.write(header + "\n")
        fh.write(body)
