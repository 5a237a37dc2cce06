"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5] [--layers 6] [--width 12]

Checks that both variants return the same answer before timing them.
The numba variant is called once first so compilation stays out of the
numbers.
"""

import argparse
import time

import numpy as np

from sliceiso import kernels
from sliceiso.fixtures import random_scenario
from sliceiso.lp import solve_lp
from sliceiso.relaxation import build_relaxation


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def product_tables(rng, layers, width):
    counts = np.full(layers, width, dtype=np.int64)
    offsets = np.arange(layers, dtype=np.int64) * width
    size = layers * width
    cost = np.round(rng.uniform(0, 5, size), 2)
    q = np.round(rng.uniform(0, 2, size), 2)
    s = np.round(rng.uniform(0, 2, size), 2)
    return cost, q, s, offsets, counts, 0.9 * layers, 0.9 * layers, 1e-9


def bench_product(args, rng):
    tables = product_tables(rng, args.layers, args.width)
    kernels.best_product_nb(*tables)
    t_nb, r_nb = best_of(lambda: kernels.best_product_nb(*tables), args.repeat)
    t_np, r_np = best_of(lambda: kernels.best_product_np(*tables), args.repeat)
    assert r_nb == r_np, (r_nb, r_np)
    return f"best_product {args.width}^{args.layers}={r_nb[1]:,} candidates", t_nb, t_np


def bench_simplex(args, rng):
    problems = []
    while len(problems) < args.lps:
        sc = random_scenario(rng, max_slices=3, max_layers=3, n_slices=3, n_layers=3)
        p = build_relaxation(sc)
        if p is not None:
            problems.append(p)

    def run(iterate):
        return [solve_lp(p, iterate=iterate).objective for p in problems]

    run(kernels.simplex_iterate_nb)
    t_nb, o_nb = best_of(lambda: run(kernels.simplex_iterate_nb), args.repeat)
    t_np, o_np = best_of(lambda: run(kernels.simplex_iterate_np), args.repeat)
    assert np.allclose(o_nb, o_np, equal_nan=True)
    return f"simplex on {args.lps} root relaxations (9 pairs each)", t_nb, t_np


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--layers", type=int, default=6)
    ap.add_argument("--width", type=int, default=12)
    ap.add_argument("--lps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':<48} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for bench in (bench_product, bench_simplex):
        name, t_nb, t_np = bench(args, rng)
        print(f"{name:<48} {t_nb * 1e3:>8.2f}ms {t_np * 1e3:>8.2f}ms {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
