#!/usr/bin/env python3
"""Benchmark the numba kernel builds against the numpy/Python fallbacks.

Both builds of each hot kernel are importable regardless of the WDJE_NUMBA
flag, so this script times them side by side on growing instances:

    python benchmarks/bench_kernels.py [--sizes 50,100,200] [--repeats 3]

The transport simplex is the same algorithm in both builds (interpreted vs
JIT-compiled); the Sinkhorn loop compares explicit JIT loops against
vectorized numpy.
"""

import argparse
import time

import numpy as np

from wdje.ot._simplex import transport_simplex_numba, transport_simplex_python
from wdje.ot.entropic import sinkhorn_loop_numba, sinkhorn_loop_numpy


def _instance(rng, n, dim=8, shift=2.0):
    a = rng.uniform(0.5, 1.5, n)
    a /= a.sum()
    b = rng.uniform(0.5, 1.5, n)
    b /= b.sum()
    x = rng.normal(size=(n, dim))
    y = rng.normal(size=(n, dim)) + shift
    cost = np.sqrt(((x[:, None, :] - y[None, :, :]) ** 2).sum(axis=2))
    return a, b, cost


def _time(func, *args, repeats=3):
    best = np.inf
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = func(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_simplex(rng, sizes, repeats):
    print("\ntransport simplex (exact EMD)")
    print(f"{'n x n':>10} {'python':>12} {'numba':>12} {'speedup':>9}")
    for n in sizes:
        a, b, cost = _instance(rng, n)
        tol = 1e-12 * (1.0 + cost.max())
        t_py, (flow_py, piv, _) = _time(
            transport_simplex_python, a.copy(), b.copy(), cost, tol, 10_000_000,
            repeats=repeats,
        )
        transport_simplex_numba(a.copy(), b.copy(), cost, tol, 10_000_000)  # warm-up
        t_nb, (flow_nb, _, _) = _time(
            transport_simplex_numba, a.copy(), b.copy(), cost, tol, 10_000_000,
            repeats=repeats,
        )
        assert np.array_equal(flow_py, flow_nb), "kernel builds disagree"
        print(f"{n:>7}x{n:<3} {t_py:>10.4f}s {t_nb:>10.4f}s {t_py / t_nb:>8.1f}x"
              f"   ({piv} pivots)")


def bench_sinkhorn(rng, sizes, repeats):
    print("\nSinkhorn scaling loop (eps = 0.05 * mean cost, 500 iterations)")
    print(f"{'n x n':>10} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for n in sizes:
        a, b, cost = _instance(rng, n)
        eps = 0.05 * cost.mean()
        args = (a.copy(), b.copy(), cost, eps, 500, 0.0)  # fixed iteration count
        t_np, (plan_np, _, _) = _time(sinkhorn_loop_numpy, *args, repeats=repeats)
        sinkhorn_loop_numba(*args)  # warm-up
        t_nb, (plan_nb, _, _) = _time(sinkhorn_loop_numba, *args, repeats=repeats)
        assert np.allclose(plan_np, plan_nb, atol=1e-12), "kernel builds disagree"
        print(f"{n:>7}x{n:<3} {t_np:>10.4f}s {t_nb:>10.4f}s {t_np / t_nb:>8.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="50,100,200",
                        help="comma-separated square instance sizes")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repetitions (best is reported)")
    args = parser.parse_args()
    if transport_simplex_numba is None or sinkhorn_loop_numba is None:
        raise SystemExit("numba is not importable; nothing to compare")
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)
    bench_simplex(rng, sizes, args.repeats)
    bench_sinkhorn(rng, sizes, args.repeats)


if __name__ == "__main__":
    main()
