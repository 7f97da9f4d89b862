#!/usr/bin/env python3
"""Benchmark the jitted stream kernels against the pure-numpy fallback.

Both implementations compute identical results (see tests/test_backends.py);
this script measures how much the jitted loops buy on the sequential parts
that numpy cannot vectorize across time steps.

Usage:
    python benchmarks/bench_backends.py [--T 2000] [--n 20] [--kernel-T 400]
                                        [--repeats 5]
"""

import argparse
import time

import numpy as np

from ridgestream import backend
from ridgestream.kernels import KernelSpec, gram


def time_call(fn, *args, repeats=5):
    fn(*args)  # warmup / jit compile
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--T", type=int, default=2000, help="ridge stream length")
    parser.add_argument("--n", type=int, default=20, help="input dimension")
    parser.add_argument("--kernel-T", type=int, default=400, help="kernel stream length")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    impls = backend.implementations()
    if "numba" not in impls:
        print("numba is not importable; only the numpy path will run")

    rng = np.random.default_rng(0)
    xs = rng.uniform(-1.0, 1.0, (args.T, args.n))
    ys = xs @ rng.standard_normal(args.n) + 0.3 * rng.standard_normal(args.T)

    kxs = rng.uniform(-1.0, 1.0, (args.kernel_T, min(args.n, 5)))
    kys = rng.standard_normal(args.kernel_T)
    kmat = gram(KernelSpec(kind="rbf", gamma=0.5), kxs)

    cases = [
        (f"ridge_stream  T={args.T} n={args.n}",
         lambda impl: impl.ridge_stream(xs, ys, 1.0)),
        (f"kernel_stream T={args.kernel_T}",
         lambda impl: impl.kernel_stream(kmat, kys, 1.0, 256)),
    ]

    print(f"{'case':<28} {'impl':<6} {'best (ms)':>10}")
    for label, runner in cases:
        timings = {}
        for name, impl in impls.items():
            timings[name] = time_call(lambda: runner(impl), repeats=args.repeats)
            print(f"{label:<28} {name:<6} {timings[name] * 1e3:>10.3f}")
        if len(timings) == 2:
            speedup = timings["numpy"] / timings["numba"]
            print(f"{label:<28} {'':<6} {speedup:>9.1f}x numba speedup")


if __name__ == "__main__":
    main()
