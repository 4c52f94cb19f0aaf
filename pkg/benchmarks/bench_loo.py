"""Benchmark the compiled LOO vote kernel against the numpy fallback.

Usage: python3 benchmarks/bench_loo.py [--sizes 2000,8000,20000] [--k 16]
Both kernels are run on identical inputs and the vote vectors are checked
for bit-identical agreement.
"""

import argparse
import sys
import time

import numpy as np

from huse import _loo_numpy
from huse.classifier import kernel_name

try:
    from huse import _loo_cy
except ImportError:
    _loo_cy = None


def bench(fn, points, labels, k, repeats=3):
    best = float("inf")
    votes = None
    for _ in range(repeats):
        start = time.perf_counter()
        votes = fn(points, labels, k)
        best = min(best, time.perf_counter() - start)
    return best, np.asarray(votes, dtype=np.float64)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="2000,8000,20000")
    parser.add_argument("--k", type=int, default=16)
    parser.add_argument("--dims", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if _loo_cy is None:
        print("compiled kernel unavailable; timing the numpy fallback only", file=sys.stderr)

    rng = np.random.default_rng(args.seed)
    print(f"{'n':>8} {'numpy':>12} {'compiled':>12} {'speedup':>8}  agree")
    for n in (int(s) for s in args.sizes.split(",")):
        points = np.ascontiguousarray(rng.normal(size=(n, args.dims)))
        labels = rng.integers(0, 2, size=n)
        t_np, v_np = bench(_loo_numpy.loo_votes, points, labels, args.k)
        if _loo_cy is None:
            print(f"{n:>8} {t_np:>11.3f}s {'-':>12} {'-':>8}")
            continue
        t_cy, v_cy = bench(_loo_cy.loo_votes, points, labels.astype(np.int64), args.k)
        agree = bool(np.array_equal(v_np, v_cy))
        print(f"{n:>8} {t_np:>11.3f}s {t_cy:>11.3f}s {t_np / t_cy:>7.1f}x  {agree}")
        if not agree:
            sys.exit("kernels disagree")


if __name__ == "__main__":
    print(f"active kernel in the library: {kernel_name()}")
    main()
