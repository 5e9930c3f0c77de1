#!/usr/bin/env python3
"""Benchmark the compiled Jacobi kernel against the NumPy fallback.

Times full factorizations (orthogonalization + post-processing) on random
complex matrices and, for context, `numpy.linalg.svd` on the same inputs.

    python benchmarks/bench_kernels.py --sizes 8,16,32,64 --repeats 20
"""

import argparse
import time

import numpy as np

import cstarpinv._kernels as kernels
from cstarpinv.pinv import svd_factor


def time_backend(name, matrices, repeats):
    try:
        backend = kernels.get_backend(name)
    except ImportError:
        return None
    saved = kernels._backend
    kernels._backend = backend
    try:
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            for m in matrices:
                svd_factor(m)
            best = min(best, time.perf_counter() - t0)
    finally:
        kernels._backend = saved
    return best / len(matrices)


def time_lapack(matrices, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for m in matrices:
            np.linalg.svd(m)
        best = min(best, time.perf_counter() - t0)
    return best / len(matrices)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,16,32,64")
    parser.add_argument("--repeats", type=int, default=10)
    parser.add_argument("--batch", type=int, default=8, help="matrices per size")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    print(f"{'size':>6} {'compiled':>12} {'python':>12} {'speedup':>9} {'lapack':>12}")
    for n in sizes:
        matrices = [
            (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            for _ in range(args.batch)
        ]
        t_c = time_backend("compiled", matrices, args.repeats)
        t_p = time_backend("python", matrices, args.repeats)
        t_l = time_lapack(matrices, args.repeats)
        c_text = f"{t_c * 1e3:10.3f}ms" if t_c is not None else "   missing"
        speedup = f"{t_p / t_c:8.1f}x" if t_c is not None else "      n/a"
        print(f"{n:>6} {c_text:>12} {t_p * 1e3:10.3f}ms {speedup:>9} {t_l * 1e3:10.3f}ms")


if __name__ == "__main__":
    main()
