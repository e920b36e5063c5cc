"""Shared domain types, loss functions, and deterministic randomness.

Everything downstream (online learning, discrepancy estimation, window ERM,
the experiment harness) builds on the types in this module. All values are
immutable after construction and safe to share across threads; random state
is always passed explicitly via :class:`RngState`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_LOSS_CLIP = 100.0
DEFAULT_NORM_BOUND = 10.0

_MASK64 = (1 << 64) - 1


class InvalidInputError(ValueError):
    """Raised when an operation receives malformed or non-finite input."""


class NumericError(ArithmeticError):
    """Raised when a numeric procedure overflows or fails to converge."""


def splitmix64(x: int) -> int:
    """One step of the SplitMix64 mixing function (Steele et al., 2014).

    Pure 64-bit integer arithmetic, so the output is identical on every
    platform. Used to derive independent child seeds from a base seed.
    """
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_seed(*parts: int) -> int:
    """Fold integers into a single 64-bit seed via a SplitMix64 chain.

    ``derive_seed(base, a, b)`` is the documented hash used everywhere a
    child seed is needed (per-trial seeds, per-grid-point seeds), so adding
    new grid points never perturbs existing streams.
    """
    h = 0
    for p in parts:
        h = splitmix64((h ^ (int(p) & _MASK64)) & _MASK64)
    return h


@dataclass(frozen=True)
class RngState:
    """Counter-based random state: a 64-bit seed plus a stream counter.

    Draws come from the Philox-4x64-10 counter-based generator (Salmon et
    al., 2011) as implemented by ``numpy.random.Philox``; stream ``s`` starts
    at counter block ``s * 2**128``, so distinct streams of the same seed can
    never overlap. Equal (seed, stream) pairs produce identical draw
    sequences on any platform; test vectors live in ``tests/test_core.py``.
    """

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.seed <= _MASK64):
            object.__setattr__(self, "seed", self.seed & _MASK64)
        if self.stream < 0:
            raise InvalidInputError("stream counter must be nonnegative")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at this (seed, stream) pair."""
        bitgen = np.random.Philox(key=self.seed, counter=self.stream << 128)
        return np.random.Generator(bitgen)

    def substream(self, *parts: int) -> "RngState":
        """Child state on stream ``derive_seed(stream, *parts)``."""
        return RngState(self.seed, derive_seed(self.stream, *parts))


def _check_finite(name: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")


@dataclass(frozen=True)
class LabeledExample:
    """A single (x, y) observation from one step of the drift sequence."""

    x: np.ndarray
    y: float

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim != 1:
            raise InvalidInputError("feature vector must be one-dimensional")
        _check_finite("x", x)
        if not np.isfinite(self.y):
            raise InvalidInputError("label must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", float(self.y))


@dataclass(frozen=True)
class Sample:
    """An ordered, timestamped sample: row t of ``X`` was drawn at step t+1.

    Stored as dense arrays (``X`` of shape (T, d), ``y`` of shape (T,)) so
    kernels can consume it directly; iterate to get `LabeledExample` views.
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise InvalidInputError("X must be (T, d) and y must be (T,)")
        _check_finite("X", X)
        _check_finite("y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_examples(cls, examples: list[LabeledExample]) -> "Sample":
        if not examples:
            return cls(np.zeros((0, 0)), np.zeros(0))
        X = np.stack([e.x for e in examples])
        y = np.array([e.y for e in examples])
        return cls(X, y)

    def __len__(self) -> int:
        return self.X.shape[0]

    def __iter__(self):
        for t in range(len(self)):
            yield LabeledExample(self.X[t], float(self.y[t]))

    @property
    def dim(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class LinearHypothesis:
    """A linear predictor x -> w . x with weights kept inside a norm ball.

    Construction projects ``weights`` onto the Euclidean ball of radius
    ``norm_bound`` (rescaling when the norm exceeds the bound), so the ball
    invariant holds by construction.
    """

    weights: np.ndarray
    norm_bound: float = DEFAULT_NORM_BOUND

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64).copy()
        if w.ndim != 1:
            raise InvalidInputError("weights must be one-dimensional")
        _check_finite("weights", w)
        if self.norm_bound < 0 or not np.isfinite(self.norm_bound):
            raise InvalidInputError("norm_bound must be finite and >= 0")
        norm = float(np.linalg.norm(w))
        if norm > self.norm_bound:
            w *= self.norm_bound / norm
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "norm_bound", float(self.norm_bound))

    @property
    def dim(self) -> int:
        return self.weights.shape[0]


def predict(h: LinearHypothesis, x: np.ndarray) -> float:
    """Inner product of the hypothesis weights with a feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != h.weights.shape:
        raise InvalidInputError(
            f"dimension mismatch: hypothesis has {h.dim}, input has {x.shape}"
        )
    _check_finite("x", x)
    return float(h.weights @ x)


@dataclass(frozen=True)
class Loss:
    """A bounded loss: clipped squared error or zero-one on the sign.

    ``bound`` is the clipping ceiling M for the squared loss; the zero-one
    loss always has M = 1. Evaluated values lie in [0, M]. ``sign(0)`` counts
    as +1 so the zero-one loss is deterministic at the boundary.
    """

    kind: str = "squared"
    bound: float = DEFAULT_LOSS_CLIP

    def __post_init__(self) -> None:
        if self.kind not in ("squared", "zero-one"):
            raise InvalidInputError(f"unknown loss kind {self.kind!r}")
        if self.kind == "zero-one":
            object.__setattr__(self, "bound", 1.0)
        elif not (np.isfinite(self.bound) and self.bound > 0):
            raise InvalidInputError("loss bound must be finite and > 0")

    def evaluate(self, prediction: float, label: float) -> float:
        return evaluate_loss(self, prediction, label)

    def evaluate_array(self, predictions: np.ndarray, labels: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; same semantics as :func:`evaluate_loss`."""
        p = np.asarray(predictions, dtype=np.float64)
        t = np.asarray(labels, dtype=np.float64)
        _check_finite("predictions", p)
        _check_finite("labels", t)
        if self.kind == "squared":
            return np.minimum((p - t) ** 2, self.bound)
        return np.where((p >= 0) == (t >= 0), 0.0, 1.0)


def evaluate_loss(loss: Loss, prediction: float, label: float) -> float:
    """Evaluate a bounded loss on one (prediction, label) pair.

    squared: min((prediction - label)^2, M). zero-one: 0 when the signs
    agree (with sign(0) = +1), else 1.
    """
    if not (np.isfinite(prediction) and np.isfinite(label)):
        raise InvalidInputError("loss inputs must be finite")
    if loss.kind == "squared":
        return float(min((prediction - label) ** 2, loss.bound))
    return 0.0 if (prediction >= 0) == (label >= 0) else 1.0
