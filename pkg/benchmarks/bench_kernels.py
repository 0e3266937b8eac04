#!/usr/bin/env python3
"""Benchmark the compiled stepping kernel against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--rows 2000] [--particles 25]
       [--steps 500]

The two backends advance identical position/increment arrays; the script
reports particle-steps per second for each and verifies the trajectories
agree bit for bit.
"""

import argparse
import math
import time

import numpy as np

from cbpsim import _kernels_py

try:
    from cbpsim import _kernels
except ImportError:
    _kernels = None


def workload(rows: int, particles: int, steps: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    pos = np.cumsum(rng.exponential(0.2, size=(rows, particles)), axis=1)
    inc = rng.standard_normal((rows, steps, particles))
    drifts = np.ascontiguousarray(np.linspace(1.0, -0.6, particles))
    return pos, drifts, inc


def bench(kernel, pos, drifts, inc, dt=1e-3):
    pos = pos.copy()
    start = time.perf_counter()
    result = kernel.advance_batch(pos, drifts, dt, math.sqrt(dt), inc, 1e9)
    elapsed = time.perf_counter() - start
    assert result is None
    return elapsed, pos


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=2000)
    parser.add_argument("--particles", type=int, default=25)
    parser.add_argument("--steps", type=int, default=500)
    args = parser.parse_args()

    pos, drifts, inc = workload(args.rows, args.particles, args.steps)
    total = args.rows * args.particles * args.steps
    print(f"workload: {args.rows} trajectories x {args.steps} steps x {args.particles} particles")

    t_py, out_py = bench(_kernels_py, pos, drifts, inc)
    print(f"numpy fallback : {t_py:8.3f} s   {total / t_py / 1e6:8.1f} M particle-steps/s")

    if _kernels is None:
        print("compiled kernel: not built (python setup.py build_ext --inplace)")
        return 0

    t_c, out_c = bench(_kernels, pos, drifts, inc)
    print(f"compiled kernel: {t_c:8.3f} s   {total / t_c / 1e6:8.1f} M particle-steps/s")
    print(f"speedup        : {t_py / t_c:8.2f} x")
    print(f"bit-identical  : {np.array_equal(out_py, out_c)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
