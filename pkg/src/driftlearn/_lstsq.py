"""Norm-ball-constrained least squares via the normal equations.

Shared by the online regret comparator, truncated-window ERM, and the
tracking comparators. The constrained solution is found by bisecting the
Lagrange multiplier of the norm constraint in the eigenbasis of X^T X.
"""

from __future__ import annotations

import numpy as np

from .core import InvalidInputError

RIDGE_JITTER = 1e-10
MULTIPLIER_TOL = 1e-10


def constrained_least_squares(
    X: np.ndarray, y: np.ndarray, radius: float
) -> np.ndarray:
    """argmin_w sum((X w - y)^2) subject to ||w|| <= radius.

    Deterministic: the unconstrained system is solved through an
    eigendecomposition of X^T X; degenerate (rank-deficient) systems get a
    fixed ridge jitter of ``RIDGE_JITTER * I``. When the unconstrained
    solution leaves the ball, the multiplier mu with ||w(mu)|| = radius is
    bisected to tolerance ``MULTIPLIER_TOL``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise InvalidInputError("X must be (n, d) with matching y of shape (n,)")
    if not (np.isfinite(radius) and radius >= 0):
        raise InvalidInputError("radius must be finite and >= 0")
    d = X.shape[1]
    if d == 0 or radius == 0.0:
        return np.zeros(d)

    G = X.T @ X
    b = X.T @ y
    lam, Q = np.linalg.eigh(G)
    lam = np.maximum(lam, 0.0)
    if lam[0] <= RIDGE_JITTER * max(1.0, lam[-1]):
        lam = lam + RIDGE_JITTER
    beta = Q.T @ b

    def weights_at(mu: float) -> np.ndarray:
        return Q @ (beta / (lam + mu))

    def norm_at(mu: float) -> float:
        return float(np.sqrt(np.sum((beta / (lam + mu)) ** 2)))

    if norm_at(0.0) <= radius:
        return weights_at(0.0)

    lo = 0.0
    hi = max(1.0, float(np.linalg.norm(beta)) / radius)
    while norm_at(hi) > radius:
        hi *= 2.0
    while hi - lo > MULTIPLIER_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if norm_at(mid) > radius:
            lo = mid
        else:
            hi = mid
    return weights_at(0.5 * (lo + hi))
