"""Discrepancy and L1 distance between distributions.

Two complementary routes:

* a closed-form spectral estimator for the squared-loss linear class on a
  norm ball: disc = 4 * bound^2 * ||A - B||_2 where A, B are second-moment
  matrices (pairwise hypothesis differences range over the doubled ball, so
  the sup of |(u.x)^2| expectation gaps is the spectral norm scaled by the
  squared diameter); clipping of the loss is ignored by this estimator,
* exact brute-force computations on discretized grid densities for the
  threshold-hypothesis zero-one-loss case, which make statements like
  "the discrepancy vanishes while the L1 distance is large" checkable
  deterministically.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_LOSS_CLIP, InvalidInputError, NumericError

POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_MAX_ITER = 100_000
_RESTART_KEY = 0x9E3779B97F4A7C15  # fixed Philox key for the one random restart


@dataclass(frozen=True)
class MomentMatrix:
    """Symmetric positive-semidefinite matrix of second moments E[x x^T]."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError("moment matrix must be square")
        if not np.all(np.isfinite(m)):
            raise InvalidInputError("moment matrix must be finite")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > 1e-12 * scale:
            raise InvalidInputError("moment matrix must be symmetric")
        m = 0.5 * (m + m.T)
        eigvals = np.linalg.eigvalsh(m)
        if eigvals[0] < -1e-9 * max(float(np.trace(m)), 1e-300):
            raise InvalidInputError("moment matrix must be positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DiscrepancyProfile:
    """Per-step discrepancies against the evaluation distribution.

    ``provenance`` records where the values came from: 'analytic' (closed
    form from known moments), 'estimated' (from samples), or 'supplied'
    (given by the caller). Values are bounded by ``loss_bound`` because a
    loss bounded by M can never separate two expectations by more than M.
    """

    values: np.ndarray
    provenance: str = "supplied"
    loss_bound: float = DEFAULT_LOSS_CLIP

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise InvalidInputError("profile values must be one-dimensional")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("profile values must be finite")
        if self.provenance not in ("analytic", "estimated", "supplied"):
            raise InvalidInputError(f"unknown provenance {self.provenance!r}")
        if v.size and (v.min() < 0 or v.max() > self.loss_bound + 1e-12):
            raise InvalidInputError("profile values must lie in [0, loss_bound]")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.shape[0]


def _power_iteration_largest(S: np.ndarray, v0: np.ndarray) -> float:
    """Largest eigenvalue of the PSD matrix S by power iteration."""
    nrm = float(np.linalg.norm(v0))
    if nrm == 0.0:
        return 0.0
    v = v0 / nrm
    rho = float(v @ S @ v)
    for _ in range(POWER_ITERATION_MAX_ITER):
        u = S @ v
        un = float(np.linalg.norm(u))
        if un == 0.0:
            return 0.0
        v = u / un
        rho_new = float(v @ S @ v)
        if abs(rho_new - rho) <= POWER_ITERATION_TOL * max(abs(rho_new), 1e-300):
            return rho_new
        rho = rho_new
    raise NumericError("power iteration did not converge")


def spectral_norm_symmetric(D: np.ndarray) -> float:
    """Spectral norm of a symmetric matrix via power iteration on D @ D.

    Deterministic start vector (1, ..., 1)/sqrt(d), plus one seeded random
    restart so an unlucky start orthogonal to the leading eigenspace cannot
    report a smaller eigenvalue.
    """
    d = D.shape[0]
    S = D @ D
    v0 = np.ones(d) / np.sqrt(d)
    best = _power_iteration_largest(S, v0)
    v1 = np.random.Generator(np.random.Philox(key=_RESTART_KEY)).standard_normal(d)
    best = max(best, _power_iteration_largest(S, v1))
    return float(np.sqrt(best))


def spectral_discrepancy(A: MomentMatrix, B: MomentMatrix, norm_bound: float) -> float:
    """Discrepancy of the unclipped squared loss on the linear norm ball.

    Equals 4 * norm_bound^2 * ||A - B||_2: hypothesis pair differences
    w - w' sweep the ball of radius 2 * norm_bound, and the expectation gap
    of ((w - w').x)^2 under the two moment matrices is maximized by the
    leading eigenvector of their difference.
    """
    if A.dim != B.dim:
        raise InvalidInputError("moment matrices must have the same dimension")
    if not (np.isfinite(norm_bound) and norm_bound >= 0):
        raise InvalidInputError("norm_bound must be finite and >= 0")
    return 4.0 * norm_bound**2 * spectral_norm_symmetric(A.matrix - B.matrix)


def empirical_moments(points: np.ndarray) -> MomentMatrix:
    """Empirical second-moment matrix (1/n) sum x x^T, symmetrized."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise InvalidInputError("points must be a nonempty (n, d) array")
    m = pts.T @ pts / pts.shape[0]
    return MomentMatrix(0.5 * (m + m.T))


def analytic_gaussian_moments(mean: np.ndarray, variance: float = 1.0) -> MomentMatrix:
    """Second moments of an isotropic Gaussian: variance * I + mean mean^T."""
    mu = np.asarray(mean, dtype=np.float64)
    if mu.ndim != 1:
        raise InvalidInputError("mean must be a vector")
    if not (np.isfinite(variance) and variance > 0):
        raise InvalidInputError("variance must be finite and > 0")
    return MomentMatrix(variance * np.eye(mu.shape[0]) + np.outer(mu, mu))


@dataclass(frozen=True)
class GridDistribution:
    """A probability distribution discretized on an axis-aligned box.

    ``probs`` has one axis per box dimension (row-major cell order);
    probabilities must be nonnegative and sum to 1 within 1e-9.
    """

    lows: np.ndarray
    highs: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        lows = np.atleast_1d(np.asarray(self.lows, dtype=np.float64))
        highs = np.atleast_1d(np.asarray(self.highs, dtype=np.float64))
        probs = np.asarray(self.probs, dtype=np.float64)
        if lows.shape != highs.shape or lows.ndim != 1:
            raise InvalidInputError("lows and highs must be matching vectors")
        if probs.ndim != lows.shape[0]:
            raise InvalidInputError("probs must have one axis per box dimension")
        if np.any(highs <= lows):
            raise InvalidInputError("box must have positive extent on every axis")
        if not np.all(np.isfinite(probs)) or probs.min() < -1e-12:
            raise InvalidInputError("cell probabilities must be nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-9:
            raise InvalidInputError(f"cell probabilities sum to {total}, not 1")
        for a in (lows, highs, probs):
            a.setflags(write=False)
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)
        object.__setattr__(self, "probs", probs)

    @property
    def resolution(self) -> tuple[int, ...]:
        return self.probs.shape

    def same_geometry(self, other: "GridDistribution") -> bool:
        return (
            self.probs.shape == other.probs.shape
            and np.allclose(self.lows, other.lows, rtol=0, atol=1e-9)
            and np.allclose(self.highs, other.highs, rtol=0, atol=1e-9)
        )

    def first_axis_boundaries(self) -> np.ndarray:
        n = self.probs.shape[0]
        return np.linspace(self.lows[0], self.highs[0], n + 1)

    def to_csv(self) -> str:
        """Serialize as CSV: an axis header block, then the cell rows."""
        buf = io.StringIO()
        buf.write("axis,min,max,cells\n")
        for i in range(self.lows.shape[0]):
            buf.write(
                f"{i},{float(self.lows[i])!r},{float(self.highs[i])!r},"
                f"{self.probs.shape[i]}\n"
            )
        buf.write("probabilities\n")
        flat = self.probs.reshape(self.probs.shape[0], -1)
        for row in flat:
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridDistribution":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != "axis,min,max,cells":
            raise InvalidInputError("missing grid CSV header")
        lows, highs, cells = [], [], []
        i = 1
        while i < len(lines) and lines[i] != "probabilities":
            parts = lines[i].split(",")
            if len(parts) != 4:
                raise InvalidInputError(f"bad axis line: {lines[i]!r}")
            lows.append(float(parts[1]))
            highs.append(float(parts[2]))
            cells.append(int(parts[3]))
            i += 1
        if i == len(lines):
            raise InvalidInputError("missing probabilities section")
        rows = [np.fromstring(ln, sep=",") for ln in lines[i + 1 :]]
        probs = np.vstack(rows).reshape(tuple(cells))
        return cls(np.array(lows), np.array(highs), probs)


def _require_same_geometry(P: GridDistribution, Q: GridDistribution) -> None:
    if not P.same_geometry(Q):
        raise InvalidInputError("grid geometries do not match")


def l1_distance(P: GridDistribution, Q: GridDistribution) -> float:
    """Total variation style L1 distance: sum of |P - Q| over cells."""
    _require_same_geometry(P, Q)
    return float(np.abs(P.probs - Q.probs).sum())


def threshold_discrepancy(P: GridDistribution, Q: GridDistribution) -> float:
    """Zero-one-loss discrepancy for thresholds on the first coordinate.

    A hypothesis pair (h, h') disagrees exactly on the stripe
    {x : h < x_1 <= h'}, so the discrepancy is the largest gap between the
    first-axis cumulative marginals of P and Q. For piecewise-constant grid
    densities the supremum is attained at cell boundaries, which is where it
    is evaluated.
    """
    _require_same_geometry(P, Q)
    if P.probs.ndim > 2:
        raise InvalidInputError("threshold discrepancy supports 1-d and 2-d grids")
    axes = tuple(range(1, P.probs.ndim))
    margin = P.probs.sum(axis=axes) - Q.probs.sum(axis=axes)
    gaps = np.concatenate([[0.0], np.cumsum(margin)])
    return float(gaps.max() - gaps.min())


def _overlap_lengths(edges: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return np.maximum(
        0.0, np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo)
    )


def rectangle_example(
    R: float, resolution: int = 400
) -> tuple[GridDistribution, GridDistribution, float]:
    """Two overlapping uniform rectangles with zero threshold discrepancy.

    P is uniform on [-1, 1] x [-1, R] and Q uniform on [-1, 1] x [-R, 1],
    both discretized on the common box [-1, 1] x [-R, R] with exact
    cell-overlap masses. Their first-coordinate marginals coincide, so the
    threshold discrepancy vanishes, while the analytic L1 distance
    2 (R - 1) / (R + 1) approaches 2 as R grows.
    """
    if not (np.isfinite(R) and R > 1):
        raise InvalidInputError("R must be finite and > 1")
    if resolution < 1:
        raise InvalidInputError("resolution must be >= 1")
    density = 1.0 / (2.0 * (R + 1.0))
    x_edges = np.linspace(-1.0, 1.0, resolution + 1)
    y_edges = np.linspace(-R, R, resolution + 1)
    x_len = x_edges[1:] - x_edges[:-1]
    p_y = _overlap_lengths(y_edges, -1.0, R)
    q_y = _overlap_lengths(y_edges, -R, 1.0)
    p_probs = density * np.outer(x_len, p_y)
    q_probs = density * np.outer(x_len, q_y)
    # normalize away the accumulated float error so the sum-to-1 invariant holds
    p_probs /= p_probs.sum()
    q_probs /= q_probs.sum()
    lows = np.array([-1.0, -R])
    highs = np.array([1.0, R])
    analytic_l1 = 2.0 * (R - 1.0) / (R + 1.0)
    return (
        GridDistribution(lows, highs, p_probs),
        GridDistribution(lows, highs, q_probs),
        analytic_l1,
    )
