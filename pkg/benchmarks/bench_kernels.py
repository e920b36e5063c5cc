"""Benchmark the jitted kernels against the pure-numpy fallback.

Runs both paths of every hot kernel over growing problem sizes and prints
the per-call time plus the speedup. The numpy column is the exact code the
package runs with DRIFTLEARN_DISABLE_NUMBA=1 (or without numba installed).

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from driftlearn._kernels import kernel_variants
from driftlearn.core import RngState

SIZES = [1_000, 10_000, 100_000]


def _time_call(fn, args, repeats):
    fn(*args)  # warm-up (and jit compile on the numba path)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _trace_args(T):
    gen = RngState(0).generator()
    X = gen.normal(size=(T, 2))
    y = gen.normal(size=T)
    eta = 0.1 / np.sqrt(np.arange(1, T + 1, dtype=np.float64))
    return X, y, eta, 10.0


def _path_args(T):
    gen = RngState(1).generator()
    steps = gen.uniform(-0.1, 0.1, size=(T, 2))
    angles = gen.uniform(-1.0, 1.0, size=T)
    return np.zeros(2), np.array([1.0, 0.0]), steps, np.cos(angles), np.sin(angles)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    variants = kernel_variants()
    if "numba" not in variants:
        print("numba unavailable: timing the numpy path only")

    bench_inputs = {
        "widrow_hoff_trace": _trace_args,
        "drift_path": _path_args,
    }
    header = f"{'kernel':20s} {'T':>8s} {'numpy (ms)':>12s} {'numba (ms)':>12s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, make_args in bench_inputs.items():
        for T in SIZES:
            call_args = make_args(T)
            t_np = _time_call(variants["numpy"][name], call_args, args.repeats)
            if "numba" in variants:
                t_nb = _time_call(variants["numba"][name], call_args, args.repeats)
                out_np = variants["numpy"][name](*call_args)
                out_nb = variants["numba"][name](*call_args)
                for a, b in zip(out_np, out_nb):
                    np.testing.assert_array_equal(a, b)
                print(
                    f"{name:20s} {T:8d} {1e3 * t_np:12.3f} {1e3 * t_nb:12.3f} "
                    f"{t_np / t_nb:7.1f}x"
                )
            else:
                print(f"{name:20s} {T:8d} {1e3 * t_np:12.3f} {'-':>12s} {'-':>8s}")


if __name__ == "__main__":
    main()
