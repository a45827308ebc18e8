#!/usr/bin/env python
"""Time the RK4 kernels compiled against their plain-Python originals.

    python benchmarks/bench_kernels.py [--n-points 4001] [--repeat 5]

Compilation is triggered once before timing, so the jit column is steady
state.  Run with MILNECHECK_DISABLE_JIT=1 and both columns are the same
Python function.
"""
import argparse
import math
import time

import numpy as np

from milnecheck import kernels
from milnecheck._jit import USE_NUMBA
from milnecheck.ode import Grid


def best_of(fn, args, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cases(n):
    grid = Grid(-5.0, 5.0, n)
    hs = grid.h
    k2 = np.ascontiguousarray(1.0 - grid.lattice(1) ** 2 / 4)
    return {
        "rk4_linear": (kernels.rk4_linear, (k2, 1.0 + 0j, 1j, hs, 1, n)),
        "rk4_milne": (kernels.rk4_milne, (np.ones_like(k2), 1.0, 2.0, 0.0, hs, 1, n)),
        "rk4_pendulum": (kernels.rk4_pendulum, (1.0, 0.0, 0.5, hs, 1, n)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n-points", type=int, default=4001)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"numba enabled: {USE_NUMBA}, n = {args.n_points}, best of {args.repeat}")
    print(f"{'kernel':<14}{'jit [ms]':>12}{'python [ms]':>14}{'speedup':>10}")
    for name, (fn, fargs) in cases(args.n_points).items():
        fn(*fargs)  # compile
        fast = best_of(fn, fargs, args.repeat)
        slow = best_of(fn.py_func, fargs, args.repeat)
        # same arithmetic, same answer
        a, b = fn(*fargs), fn.py_func(*fargs)
        np.testing.assert_allclose(a[0], b[0], rtol=1e-12, atol=1e-12)
        print(f"{name:<14}{fast * 1e3:>12.3f}{slow * 1e3:>14.3f}{slow / fast:>10.1f}")


if __name__ == "__main__":
    main()
