"""Discrepancy-weighted combination of online hypotheses.

The weight vector solves min_w lambda ||w||^2 + sum_t w_t c_t over the
probability simplex, with costs c_t = disc_t + loss_t. Because the Hessian
is lambda * I, the minimizer is the Euclidean projection of -c / (2 lambda)
onto the simplex, so no generic QP solver is needed: the sort-based
projection is exact, deterministic, and O(T log T).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import InvalidInputError, LinearHypothesis
from .discrepancy import DiscrepancyProfile
from .online import Trace


@dataclass(frozen=True)
class SimplexWeights:
    """Nonnegative weights summing to one."""

    w: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise InvalidInputError("weights must be a nonempty vector")
        if not np.all(np.isfinite(w)):
            raise InvalidInputError("weights must be finite")
        if w.min() < 0 or abs(float(w.sum()) - 1.0) > 1e-9:
            raise InvalidInputError("weights must be nonnegative and sum to 1")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    def __len__(self) -> int:
        return self.w.shape[0]


@dataclass(frozen=True)
class QPInstance:
    """Costs and ridge strength of the simplex-constrained weight problem."""

    costs: np.ndarray
    ridge: float

    def __post_init__(self) -> None:
        c = np.asarray(self.costs, dtype=np.float64)
        if c.ndim != 1 or c.size == 0:
            raise InvalidInputError("costs must be a nonempty vector")
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("costs must be finite")
        if not (np.isfinite(self.ridge) and self.ridge >= 0):
            raise InvalidInputError("ridge must be finite and >= 0")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "costs", c)
        object.__setattr__(self, "ridge", float(self.ridge))

    def objective(self, w: np.ndarray) -> float:
        w = np.asarray(w, dtype=np.float64)
        return float(self.ridge * np.sum(w * w) + self.costs @ w)


def project_simplex(v: np.ndarray) -> SimplexWeights:
    """Euclidean projection onto {w >= 0, sum w = 1} (sort-based, exact)."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError("input must be a nonempty vector")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("input must be finite")
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, v.size + 1)
    rho = int(np.nonzero(u + (1.0 - css) / ks > 0)[0][-1])
    theta = (1.0 - css[rho]) / (rho + 1)
    return SimplexWeights(np.maximum(v + theta, 0.0))


def solve_weights(qp: QPInstance) -> SimplexWeights:
    """Minimize ridge ||w||^2 + costs . w over the simplex, in closed form.

    For ridge > 0 this is project_simplex(-costs / (2 ridge)). For ridge = 0
    the objective is linear and all mass is split uniformly over the
    minimum-cost indices (a deterministic, symmetric tie-break).
    """
    if qp.ridge == 0.0:
        winners = qp.costs == qp.costs.min()
        w = winners / winners.sum()
        return SimplexWeights(w)
    return project_simplex(-qp.costs / (2.0 * qp.ridge))


def combine(
    hypotheses: list[LinearHypothesis], weights: SimplexWeights
) -> LinearHypothesis:
    """Convex combination sum_t w_t h_t of linear hypotheses.

    The combination is itself linear and, by convexity of the norm ball,
    stays inside the largest of the component balls.
    """
    if len(hypotheses) != len(weights):
        raise InvalidInputError("hypothesis and weight counts differ")
    if not hypotheses:
        raise InvalidInputError("need at least one hypothesis")
    dims = {h.dim for h in hypotheses}
    if len(dims) != 1:
        raise InvalidInputError("hypotheses must share one dimension")
    rows = np.stack([h.weights for h in hypotheses])
    bound = max(h.norm_bound for h in hypotheses)
    return LinearHypothesis(weights.w @ rows, bound)


@dataclass(frozen=True)
class BoundReport:
    """All terms of the two generalization inequalities for a weighting.

    ``loss_bound_total`` bounds the next-step expected loss by the weighted
    empirical loss plus average discrepancy plus a deviation term
    M ||w||_2 sqrt(2 log(1/delta)). ``excess_bound_total`` bounds the excess
    over the best hypothesis in the ball via the regret, the distance to
    uniform weights, and a doubled-confidence deviation term; the variant
    with the average discrepancy counted twice is reported alongside because
    the two readings of that inequality differ in exactly that coefficient.
    """

    confidence: float
    avg_discrepancy: float
    weighted_loss: float
    deviation_term: float
    uniform_distance_term: float
    regret_term: float
    excess_deviation_term: float
    loss_bound_total: float
    excess_bound_total: float
    excess_bound_total_double_disc: float

    _JSON_FIELDS = (
        "confidence",
        "avg_discrepancy",
        "weighted_loss",
        "deviation_term",
        "uniform_distance_term",
        "regret_term",
        "excess_deviation_term",
        "loss_bound_total",
        "excess_bound_total",
        "excess_bound_total_double_disc",
    )

    def to_json(self) -> str:
        return json.dumps(
            {name: getattr(self, name) for name in self._JSON_FIELDS},
            indent=2,
            sort_keys=False,
        )

    @classmethod
    def from_json(cls, text: str) -> "BoundReport":
        return cls(**json.loads(text))


def bound_report(
    weights: SimplexWeights,
    profile: DiscrepancyProfile,
    trace: Trace,
    regret_total: float,
    loss_bound: float,
    confidence: float,
) -> BoundReport:
    """Assemble every term of both weighting inequalities exactly."""
    if not (0.0 < confidence < 1.0):
        raise InvalidInputError("confidence must lie in (0, 1)")
    T = len(weights)
    if len(profile) != T or len(trace) != T:
        raise InvalidInputError("weights, profile, and trace lengths differ")
    w = weights.w
    avg_disc = float(w @ profile.values)
    weighted_loss = float(w @ trace.losses)
    w_l2 = float(np.linalg.norm(w))
    deviation = loss_bound * w_l2 * math.sqrt(2.0 * math.log(1.0 / confidence))
    uniform_dist = loss_bound * float(np.abs(w - 1.0 / T).sum())
    regret_term = regret_total / T
    excess_deviation = (
        2.0 * loss_bound * w_l2 * math.sqrt(2.0 * math.log(2.0 / confidence))
    )
    excess = regret_term + avg_disc + uniform_dist + excess_deviation
    return BoundReport(
        confidence=confidence,
        avg_discrepancy=avg_disc,
        weighted_loss=weighted_loss,
        deviation_term=deviation,
        uniform_distance_term=uniform_dist,
        regret_term=regret_term,
        excess_deviation_term=excess_deviation,
        loss_bound_total=weighted_loss + avg_disc + deviation,
        excess_bound_total=excess,
        excess_bound_total_double_disc=excess + avg_disc,
    )


def generalization_bound(
    avg_loss: float,
    rademacher: float,
    avg_discrepancy: float,
    loss_bound: float,
    confidence: float,
    T: int,
) -> float:
    """Uniform-weight generalization bound with a plug-in complexity term.

    avg_loss + 2 * rademacher + avg_discrepancy
    + loss_bound * sqrt(log(1/confidence) / (2 T)). For the squared loss the
    complexity plug-in for the loss class is 2 M times the complexity of the
    hypothesis class itself.
    """
    if not (0.0 < confidence < 1.0):
        raise InvalidInputError("confidence must lie in (0, 1)")
    for name, v in (
        ("avg_loss", avg_loss),
        ("rademacher", rademacher),
        ("avg_discrepancy", avg_discrepancy),
        ("loss_bound", loss_bound),
    ):
        if not (np.isfinite(v) and v >= 0):
            raise InvalidInputError(f"{name} must be finite and >= 0")
    if T < 1:
        raise InvalidInputError("T must be >= 1")
    return (
        avg_loss
        + 2.0 * rademacher
        + avg_discrepancy
        + loss_bound * math.sqrt(math.log(1.0 / confidence) / (2.0 * T))
    )
