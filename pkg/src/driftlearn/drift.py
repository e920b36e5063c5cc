"""Synthetic drift generators.

Two schedules are provided:

* :func:`generate_drift` replicates the benchmark setting: the input mean
  performs a uniform random walk, the target vector rotates by a uniform
  random angle each step, inputs are isotropic Gaussians around the moving
  mean, and labels are noiseless inner products with the moving target.
* :func:`generate_constant_drift` is the tracking schedule: the input mean
  and the target co-rotate on circles by a fixed-magnitude random-sign
  angular step chosen so the analytic spectral discrepancy between
  consecutive input distributions equals a requested value exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import (
    DEFAULT_LOSS_CLIP,
    DEFAULT_NORM_BOUND,
    InvalidInputError,
    Loss,
    RngState,
    Sample,
)
from .discrepancy import (
    DiscrepancyProfile,
    analytic_gaussian_moments,
    spectral_discrepancy,
)


@dataclass(frozen=True)
class DriftConfig:
    """Random-walk drift schedule for the three-algorithm comparison.

    Per step: the mean moves by a uniform draw from the square of half-width
    ``mean_step``, the target rotates by an angle uniform in
    (-``rotation``, ``rotation``) radians, inputs are N(mean, noise^2 I),
    and the label is the noiseless inner product with the current target.
    ``norm_bound`` is the learner's hypothesis ball. ``profile_norm_bound``
    is the ball radius entering the analytic discrepancy profile; it
    defaults to the scale the drifting targets actually live on (norm 1)
    rather than the full learner ball, which keeps the per-step values
    informative instead of saturating at the cap. Profile values are capped
    at ``loss_clip`` since a loss bounded by M cannot separate two
    distributions by more than M.
    """

    T: int = 200
    seed: int = 0
    mu0: tuple[float, float] = (0.0, 0.0)
    w0: tuple[float, float] = (1.0, 0.0)
    mean_step: float = 0.1
    rotation: float = 1.0
    noise: float = 1.0
    test_size: int = 100
    norm_bound: float = DEFAULT_NORM_BOUND
    profile_norm_bound: float = 1.0
    loss_clip: float = DEFAULT_LOSS_CLIP

    def __post_init__(self) -> None:
        if self.T < 0 or self.test_size < 0:
            raise InvalidInputError("T and test_size must be >= 0")
        if self.mean_step < 0 or self.rotation < 0:
            raise InvalidInputError("drift half-widths must be >= 0")
        if self.profile_norm_bound < 0:
            raise InvalidInputError("profile_norm_bound must be >= 0")
        if not (np.isfinite(self.noise) and self.noise > 0):
            raise InvalidInputError("noise scale must be finite and > 0")


def generate_drift(
    cfg: DriftConfig, rng: RngState
) -> tuple[Sample, Sample, DiscrepancyProfile]:
    """Draw one drift sequence plus a test set from the next distribution.

    Returns (training sample of length T, test sample of ``test_size``
    points from step T + 1, analytic per-step discrepancy profile against
    step T + 1). Draw order from the generator is fixed (mean steps, then
    rotation angles, then training noise, then test noise) so equal seeds
    give bit-identical output.
    """
    gen = rng.generator()
    T = cfg.T
    steps = gen.uniform(-cfg.mean_step, cfg.mean_step, size=(T + 1, 2))
    angles = gen.uniform(-cfg.rotation, cfg.rotation, size=T + 1)
    z_train = gen.standard_normal((T, 2))
    z_test = gen.standard_normal((cfg.test_size, 2))

    means, targets = _kernels.drift_path(
        np.asarray(cfg.mu0, dtype=np.float64),
        np.asarray(cfg.w0, dtype=np.float64),
        steps,
        np.cos(angles),
        np.sin(angles),
    )
    X = means[:T] + cfg.noise * z_train
    y = np.sum(targets[:T] * X, axis=1)
    X_test = means[T] + cfg.noise * z_test
    y_test = X_test @ targets[T]

    variance = cfg.noise**2
    final_moments = analytic_gaussian_moments(means[T], variance)
    disc = np.empty(T)
    for t in range(T):
        disc[t] = spectral_discrepancy(
            analytic_gaussian_moments(means[t], variance),
            final_moments,
            cfg.profile_norm_bound,
        )
    profile = DiscrepancyProfile(
        np.minimum(disc, cfg.loss_clip), "analytic", cfg.loss_clip
    )
    return Sample(X, y), Sample(X_test, y_test), profile


@dataclass(frozen=True)
class ConstantDriftConfig:
    """Tracking schedule with a constant per-step spectral discrepancy.

    The input mean lives on a circle of radius ``mean_radius`` and advances
    by a random-sign angular step of fixed magnitude; the target vector (of
    norm ``target_norm``, typically outside the hypothesis ball so the
    best-in-ball hypothesis genuinely moves with the inputs) co-rotates by
    the same signed step. With step magnitude omega, consecutive input
    moment matrices differ by spectral norm mean_radius^2 sin(omega), so
    requesting a per-step discrepancy of ``delta`` fixes
    omega = asin(delta / (4 norm_bound^2 mean_radius^2)) exactly.
    """

    delta: float
    norm_bound: float = 1.0
    mean_radius: float = 1.0
    target_norm: float = 2.0
    label_noise: float = 0.5
    loss: Loss = field(default_factory=Loss)

    def __post_init__(self) -> None:
        if not (np.isfinite(self.delta) and self.delta >= 0):
            raise InvalidInputError("delta must be finite and >= 0")
        if self.norm_bound <= 0 or self.mean_radius <= 0:
            raise InvalidInputError("norm_bound and mean_radius must be > 0")
        if self.target_norm < 0 or self.label_noise < 0:
            raise InvalidInputError("target_norm and label_noise must be >= 0")

    @property
    def max_delta(self) -> float:
        return 4.0 * self.norm_bound**2 * self.mean_radius**2

    def angular_step(self) -> float:
        """Per-step rotation magnitude realizing the requested delta."""
        if self.delta > self.max_delta:
            raise InvalidInputError(
                f"per-step discrepancy {self.delta} is unreachable; the "
                f"attainable range for this configuration is [0, {self.max_delta}]"
            )
        return math.asin(self.delta / self.max_delta)


def _unit(angle: np.ndarray) -> np.ndarray:
    return np.stack([np.cos(angle), np.sin(angle)], axis=-1)


def generate_constant_drift(
    cfg: ConstantDriftConfig, T: int, rng: RngState
) -> tuple[Sample, np.ndarray, np.ndarray]:
    """Draw T drifting examples; also return the step-(T+1) mean and target.

    Draw order: T + 1 signed steps, training inputs, training label noise.
    Evaluation-time draws are left to the caller so it can continue on the
    same generator stream or use a fresh one.
    """
    if T < 0:
        raise InvalidInputError("T must be >= 0")
    gen = rng.generator()
    omega = cfg.angular_step()
    signs = np.where(gen.integers(0, 2, size=T + 1) == 1, 1.0, -1.0)
    z = gen.standard_normal((T, 2))
    xi = gen.standard_normal(T)

    psi = np.concatenate([[0.0], np.cumsum(signs * omega)])  # angles at steps 1..T+1
    means = cfg.mean_radius * _unit(psi[1:])
    targets = cfg.target_norm * _unit(psi[1:])
    X = means[:T] + z
    y = np.sum(targets[:T] * X, axis=1) + cfg.label_noise * xi
    return Sample(X, y), means[T], targets[T]


def draw_labeled(
    cfg: ConstantDriftConfig,
    mean: np.ndarray,
    target: np.ndarray,
    n: int,
    gen: np.random.Generator,
) -> Sample:
    """n labeled points from the fixed distribution (mean, target)."""
    X = mean + gen.standard_normal((n, 2))
    y = X @ target + cfg.label_noise * gen.standard_normal(n)
    return Sample(X, y)
