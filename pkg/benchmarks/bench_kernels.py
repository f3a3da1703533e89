"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--size N] [--repeat R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lpplab import _kernels_py as py_backend

try:
    from lpplab import _kernels_cy as cy_backend
except ImportError:
    cy_backend = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    n = args.size
    rng = np.random.default_rng(0)
    w = rng.standard_normal(n)
    tprev = rng.standard_normal(n)
    x = rng.standard_normal(n)
    dprev = np.full(n + 1, -np.inf)
    dprev[0] = 0.0
    k_tri = 2000
    d = rng.standard_normal(k_tri)
    e = np.abs(rng.standard_normal(k_tri - 1)) + 0.1

    cases = [
        ("lpp_first_row", lambda b: b.lpp_first_row(w, np.empty(n))),
        ("lpp_row_update", lambda b: b.lpp_row_update(tprev.copy(), w, np.empty(n))),
        (
            "partition_row_update",
            lambda b: b.partition_row_update(dprev.copy(), x, np.empty(n + 1)),
        ),
        (
            "sturm_lambda_max",
            lambda b: b.sturm_lambda_max(d, e, 1e-10, 200),
        ),
    ]
    print(f"array size {n}, tridiagonal order {k_tri}, best of {args.repeat}")
    print(f"{'kernel':<22}{'python (s)':>12}{'cython (s)':>12}{'speedup':>10}")
    for name, call in cases:
        t_py = _time(lambda: call(py_backend), args.repeat)
        if cy_backend is None:
            print(f"{name:<22}{t_py:>12.5f}{'n/a':>12}{'n/a':>10}")
            continue
        t_cy = _time(lambda: call(cy_backend), args.repeat)
        print(f"{name:<22}{t_py:>12.5f}{t_cy:>12.5f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
