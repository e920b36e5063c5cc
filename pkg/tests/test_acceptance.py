"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Every criterion is deterministic given its fixed seeds and produces a
serialized artifact (CSV or JSON bytes); the final criterion re-runs each
producer and checks the artifacts are byte-identical. Run with

    pytest tests/test_acceptance.py -v -s
"""

import json
import math
import time

import numpy as np
import pytest

from driftlearn import (
    DriftConfig,
    QPInstance,
    RngState,
    WindowConfig,
    bound_trial,
    derive_seed,
    experiment_csv,
    l1_distance,
    optimal_window,
    rectangle_example,
    run_experiment,
    solve_weights,
    spectral_discrepancy,
    threshold_discrepancy,
    tracking_csv_rows,
    tracking_sweep,
)
from driftlearn.discrepancy import MomentMatrix

_RESULTS: dict = {}


def _run_cached(name, producer):
    if name not in _RESULTS:
        start = time.perf_counter()
        ok, detail, artifact = producer()
        elapsed = time.perf_counter() - start
        _RESULTS[name] = (ok, detail, artifact, elapsed)
    return _RESULTS[name]


def _report(num, name, ok, detail, elapsed, limit):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {num} ({name}): {status} [{elapsed:.1f}s] {detail}")
    assert elapsed < limit, f"runtime {elapsed:.1f}s exceeded the {limit}s limit"
    assert ok, f"criterion {num} failed: {detail}"


# ----------------------------------------------------------- criterion 1


def _criterion1():
    expected = {2.0: 2.0 / 3.0, 10.0: 18.0 / 11.0, 100.0: 2.0 * 99.0 / 101.0}
    lines = ["R,analytic_l1,grid_l1,threshold_disc"]
    ok = True
    worst_l1, worst_disc = 0.0, 0.0
    for R, analytic in expected.items():
        P, Q, reported = rectangle_example(R, 400)
        l1 = l1_distance(P, Q)
        disc = threshold_discrepancy(P, Q)
        lines.append(f"{R!r},{reported!r},{l1!r},{disc!r}")
        worst_l1 = max(worst_l1, abs(l1 - analytic))
        worst_disc = max(worst_disc, disc)
        ok = ok and abs(l1 - analytic) <= 0.02 and disc <= 0.01
        ok = ok and abs(reported - analytic) < 1e-12
    detail = f"max |l1 - analytic| = {worst_l1:.2e}, max disc = {worst_disc:.2e}"
    return ok, detail, ("\n".join(lines) + "\n").encode()


def test_criterion_1_rectangle_separation():
    ok, detail, _, elapsed = _run_cached("c1", _criterion1)
    _report(1, "rectangle separation", ok, detail, elapsed, 5.0)


# ----------------------------------------------------------- criterion 2


def _criterion2():
    gen = RngState(derive_seed(2025, 2)).generator()
    max_kkt = 0.0
    max_gap = -np.inf
    ok = True
    for _ in range(200):
        T = int(gen.integers(2, 11))
        costs = gen.uniform(0.0, 1.0, size=T)
        ridge = float(gen.choice([0.01, 0.1, 1.0]))
        qp = QPInstance(costs, ridge)
        w = solve_weights(qp).w

        grad = 2.0 * ridge * w + costs
        active = w > 1e-12
        tau = grad[active].max()
        kkt = float(grad[active].max() - grad[active].min())
        if (~active).any():
            kkt = max(kkt, max(0.0, float(tau - grad[~active].min())))
        max_kkt = max(max_kkt, kkt)

        rand = gen.exponential(size=(100_000, T))
        rand /= rand.sum(axis=1, keepdims=True)
        best_rand = float((ridge * np.sum(rand**2, axis=1) + rand @ costs).min())
        gap = qp.objective(w) - best_rand
        max_gap = max(max_gap, gap)
        ok = ok and kkt <= 1e-7 and gap <= 1e-9
    detail = f"max KKT residual = {max_kkt:.2e}, max objective gap = {max_gap:.2e}"
    payload = json.dumps(
        {"instances": 200, "max_kkt": max_kkt, "max_objective_gap": max_gap}
    ).encode()
    return ok, detail, payload


def test_criterion_2_qp_correctness():
    ok, detail, _, elapsed = _run_cached("c2", _criterion2)
    _report(2, "QP correctness", ok, detail, elapsed, 10.0)


# ----------------------------------------------------------- criterion 3


def _criterion3():
    gen = RngState(derive_seed(2025, 3)).generator()
    worst = 0.0
    ok = True
    for _ in range(50):
        d = int(gen.integers(1, 4))
        XA = gen.normal(size=(d + 3, d))
        XB = gen.normal(size=(d + 3, d))
        A = MomentMatrix(XA.T @ XA / XA.shape[0])
        B = MomentMatrix(XB.T @ XB / XB.shape[0])
        bound = float(gen.uniform(0.5, 3.0))
        exact = spectral_discrepancy(A, B, bound)
        U = gen.normal(size=(100_000, d))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        scaled = 2.0 * bound * U
        sampled = float(
            np.abs(np.einsum("ij,jk,ik->i", scaled, A.matrix - B.matrix, scaled)).max()
        )
        rel = abs(exact - sampled) / max(exact, 1e-12)
        worst = max(worst, rel)
        ok = ok and rel <= 0.02
    detail = f"max relative error vs sampled sup = {worst:.4f}"
    payload = json.dumps({"pairs": 50, "max_relative_error": worst}).encode()
    return ok, detail, payload


def test_criterion_3_spectral_oracle():
    ok, detail, _, elapsed = _run_cached("c3", _criterion3)
    _report(3, "spectral oracle", ok, detail, elapsed, 30.0)


# ----------------------------------------------------------- criterion 4


def _criterion4():
    T_grid = [100, 200, 400, 800]
    rows = run_experiment(T_grid, trials=50, base_seed=0)
    by_T: dict = {}
    for r in rows:
        by_T.setdefault(r.T, {})[r.algorithm] = r.mean_mse
    wins = sum(
        1
        for d in by_T.values()
        if d["weighted"] <= d["regular"] and d["weighted"] <= d["fixed"]
    )
    increasing = all(
        all(by_T[a][alg] <= by_T[b][alg] for a, b in zip(T_grid, T_grid[1:]))
        for alg in ("weighted", "regular", "fixed")
    )
    ok = wins >= 3 and increasing
    detail = (
        f"weighted wins at {wins}/4 grid points; error increasing with T: "
        f"{increasing}"
    )
    return ok, detail, experiment_csv(rows).encode()


def test_criterion_4_three_algorithm_comparison():
    ok, detail, _, elapsed = _run_cached("c4", _criterion4)
    _report(4, "comparison replication", ok, detail, elapsed, 300.0)


# ----------------------------------------------------------- criterion 5


def _criterion5():
    trials = 200
    confidence = 0.1
    violations = 0
    lines = ["trial,bound,realized"]
    for trial in range(trials):
        cfg = DriftConfig(T=200)
        report, realized = bound_trial(
            cfg, RngState(derive_seed(2025, 5, trial)), confidence
        )
        if realized > report.loss_bound_total:
            violations += 1
        lines.append(f"{trial},{report.loss_bound_total!r},{realized!r}")
    rate = violations / trials
    ok = rate <= 0.15
    detail = f"bound violated in {violations}/{trials} trials ({100 * rate:.1f}%)"
    return ok, detail, ("\n".join(lines) + "\n").encode()


def test_criterion_5_bound_coverage():
    ok, detail, _, elapsed = _run_cached("c5", _criterion5)
    _report(5, "bound coverage", ok, detail, elapsed, 300.0)


# ----------------------------------------------------------- criterion 6


def _criterion6():
    cfg = WindowConfig(1, 2.0, 1.0, 0.1, confidence_const=1.0)
    canonical_ok = optimal_window(cfg, 1000) == 6

    gen = RngState(derive_seed(2025, 6)).generator()
    worst = 0
    for _ in range(100):
        wcfg = WindowConfig(
            1,
            float(gen.uniform(0.5, 20)),
            float(gen.uniform(0.1, 5)),
            float(gen.uniform(0.005, 1.0)),
            float(gen.uniform(0.01, 0.5)),
            float(gen.uniform(0.5, 5)),
        )
        T = int(gen.integers(50, 2000))
        total = wcfg.rademacher_const + wcfg.confidence_const

        def curve(m):
            return total * math.sqrt(wcfg.vc_dim / m) + (m + 1) * wcfg.drift_bound

        scan = min(range(1, T + 1), key=curve)
        worst = max(worst, abs(optimal_window(wcfg, T) - scan))
    ok = canonical_ok and worst <= 1
    detail = f"canonical case -> 6: {canonical_ok}; max |window - argmin| = {worst}"
    payload = json.dumps(
        {"canonical_is_six": canonical_ok, "max_argmin_distance": worst}
    ).encode()
    return ok, detail, payload


def test_criterion_6_optimal_window_formula():
    ok, detail, _, elapsed = _run_cached("c6", _criterion6)
    _report(6, "optimal window formula", ok, detail, elapsed, 1.0)


# ----------------------------------------------------------- criterion 7


def _criterion7():
    deltas = [0.01, 0.03, 0.1, 0.3]
    results = tracking_sweep(deltas, trials=50, base_seed=0)
    gaps = np.array([r.gap for r in results])
    slope = float(np.polyfit(np.log(deltas), np.log(np.maximum(gaps, 1e-12)), 1)[0])
    ok = 0.15 <= slope <= 0.55
    detail = (
        f"log-log slope = {slope:.3f} (target window [0.15, 0.55]); "
        f"gaps = {[round(float(g), 4) for g in gaps]}"
    )
    return ok, detail, tracking_csv_rows(results).encode()


def test_criterion_7_tracking_exponent():
    # Known red: the realized gap of the squared loss at the bound-optimal
    # window scales like drift^(2/3) (fast-rate estimation error ~ 1/m with
    # m ~ drift^(-2/3)), with the lag-bias component adding up to
    # drift^(4/3). The [0.15, 0.55] window targets the drift^(1/3) scaling
    # of the deviation bound itself, which a locally quadratic loss cannot
    # realize; only nonsmooth losses (outside this package's scope) track
    # that exponent. The criterion runs faithfully and reports the measured
    # slope rather than being loosened to force a pass.
    ok, detail, _, elapsed = _run_cached("c7", _criterion7)
    _report(7, "tracking exponent", ok, detail, elapsed, 600.0)


# ----------------------------------------------------------- criterion 8


def test_criterion_8_determinism():
    producers = {
        "c1": _criterion1,
        "c2": _criterion2,
        "c3": _criterion3,
        "c4": _criterion4,
        "c5": _criterion5,
        "c6": _criterion6,
        "c7": _criterion7,
    }
    start = time.perf_counter()
    mismatched = []
    for name, producer in producers.items():
        first = _run_cached(name, producer)[2]
        again = producer()[2]
        if first != again:
            mismatched.append(name)
    elapsed = time.perf_counter() - start
    ok = not mismatched
    detail = (
        "all artifacts byte-identical on re-run"
        if ok
        else f"artifacts differ on re-run: {mismatched}"
    )
    _report(8, "determinism", ok, detail, elapsed, 1200.0)
