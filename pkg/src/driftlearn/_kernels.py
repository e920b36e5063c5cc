"""Hot sequential kernels with a numba fast path and a pure-numpy fallback.

The per-step recurrences here (online weight updates, drift-path
accumulation) cannot be vectorized, so they are the only loops worth
jitting. Both paths run the *same* source, so results are bit-identical
whether or not numba is active.

Set ``DRIFTLEARN_DISABLE_NUMBA=1`` in the environment (before import) to
force the pure-numpy path; it is also selected automatically when numba is
not installed. ``benchmarks/bench_kernels.py`` compares the two paths.
"""

from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "DRIFTLEARN_DISABLE_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(ENV_FLAG, "0").lower() not in ("1", "true", "yes")


def _widrow_hoff_trace(X, y, eta, norm_bound):
    """Run the LMS recurrence over a sample.

    Returns (W, preds): W[t] is the hypothesis *before* example t (W[0] is
    the zero start, W[T] the final post-update weights) and preds[t] is the
    prediction W[t] . X[t] made before the update at step t.
    """
    T = X.shape[0]
    d = X.shape[1]
    W = np.zeros((T + 1, d))
    preds = np.zeros(T)
    w = np.zeros(d)
    for t in range(T):
        p = 0.0
        for j in range(d):
            p += w[j] * X[t, j]
        preds[t] = p
        g = eta[t] * (y[t] - p)
        for j in range(d):
            w[j] += g * X[t, j]
        s = 0.0
        for j in range(d):
            s += w[j] * w[j]
        if s > norm_bound * norm_bound:
            scale = norm_bound / np.sqrt(s)
            for j in range(d):
                w[j] *= scale
        for j in range(d):
            W[t + 1, j] = w[j]
    return W, preds


def _drift_path(mu0, w0, steps, cos_angles, sin_angles):
    """Accumulate the 2-d drift recurrence for n steps.

    means[k] and targets[k] hold the mean and target *after* k+1 steps, so
    with n = T + 1 the rows cover steps 1..T+1 of the schedule. The caller
    passes precomputed cosines and sines of the rotation angles; keeping the
    kernel free of libm calls makes both execution paths bit-identical.
    """
    n = steps.shape[0]
    means = np.empty((n, 2))
    targets = np.empty((n, 2))
    mx, my = mu0[0], mu0[1]
    wx, wy = w0[0], w0[1]
    for k in range(n):
        mx += steps[k, 0]
        my += steps[k, 1]
        c = cos_angles[k]
        s = sin_angles[k]
        wx, wy = c * wx - s * wy, s * wx + c * wy
        means[k, 0] = mx
        means[k, 1] = my
        targets[k, 0] = wx
        targets[k, 1] = wy
    return means, targets


_IMPLS = {
    "widrow_hoff_trace": _widrow_hoff_trace,
    "drift_path": _drift_path,
}


def _jit_all() -> dict:
    from numba import njit

    return {name: njit(cache=True)(fn) for name, fn in _IMPLS.items()}


USING_NUMBA = False
if _numba_requested():
    try:
        _active = _jit_all()
        USING_NUMBA = True
    except ImportError:
        _active = _IMPLS
else:
    _active = _IMPLS

widrow_hoff_trace = _active["widrow_hoff_trace"]
drift_path = _active["drift_path"]


def kernel_variants() -> dict[str, dict]:
    """Both kernel sets, keyed 'numpy' and (when available) 'numba'.

    Used by the benchmark script to time the paths against each other
    without re-importing the module under a different environment.
    """
    variants = {"numpy": dict(_IMPLS)}
    try:
        variants["numba"] = _jit_all()
    except ImportError:
        pass
    return variants
