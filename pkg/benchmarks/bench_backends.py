#!/usr/bin/env python3
"""Compare the compiled decomposition kernel against the pure-Python twin.

Times the greedy permutation extraction on dense doubly stochastic
matrices (the hot path of `permflip decompose`). Results of both
backends are checked for exact agreement before timing is reported.

Usage: python3 benchmarks/bench_backends.py [--sizes 8,16,32,64] [--repeats 3]
"""

import argparse
import time

import numpy as np

import permflip._backend as backend_mod
from permflip.decomposition import sinkhorn


def _bench(kernel, s, tol, max_terms, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        work = s.copy()
        started = time.perf_counter()
        result = kernel.greedy_birkhoff(work, tol, max_terms)
        best = min(best, time.perf_counter() - started)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,16,32,64")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if backend_mod._compiled is None:
        raise SystemExit("compiled kernel not built; run pip install -e . first")

    rng = np.random.default_rng(args.seed)
    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"{'N':>5} {'terms':>6} {'compiled':>10} {'pure':>10} {'speedup':>8}")
    for size in sizes:
        _, s = sinkhorn(0.05 + rng.random((size, size)))
        max_terms = size * size
        t_c, r_c = _bench(backend_mod._compiled, s, 1e-10, max_terms, args.repeats)
        t_p, r_p = _bench(backend_mod.matching_py, s, 1e-10, max_terms, args.repeats)
        if not (np.array_equal(r_c[0], r_p[0]) and np.array_equal(r_c[1], r_p[1])):
            raise SystemExit(f"backend outputs differ at N={size}")
        print(
            f"{size:>5} {len(r_c[0]):>6} {t_c:>9.4f}s {t_p:>9.4f}s "
            f"{t_p / t_c:>7.1f}x"
        )


if __name__ == "__main__":
    main()
