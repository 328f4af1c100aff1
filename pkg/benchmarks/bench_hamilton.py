#!/usr/bin/env python3
"""Benchmark: compiled Hamilton-search kernel vs the pure Python fallback.

Three workloads dominated by the kernel's inner loop:
  * enumerate: count all Hamilton cycles of a complete bipartite graph
  * prescribed: first cycle through a prescribed path system in a dense host
  * peel: decompose a complete bipartite graph into Hamilton cycles by
    repeated first-cycle searches

Usage: python benchmarks/bench_hamilton.py [--repeat N]
"""

import argparse
import time

from bipham.graphs import PathSystem, complete_bipartite
from bipham.hamkernel import HAVE_FAST
from bipham.search import CycleSearch, Prescribed
from bipham.validate import cycle_edges


def bench_enumerate(force_pure):
    g = complete_bipartite((6, 6))
    n = sum(1 for _ in CycleSearch(g, force_pure=force_pure).cycles())
    return f"{n} cycles"


def bench_prescribed(force_pure):
    g = complete_bipartite((9, 9))
    q = PathSystem(18, [(0, 9), (9, 1), (2, 11), (11, 3)])
    found = 0
    for seed in range(10):
        search = CycleSearch(
            g.minus_edges(q.edges), [Prescribed(p) for p in q.paths],
            seed=seed, force_pure=force_pure,
        )
        if search.first() is not None:
            found += 1
    return f"{found}/10 found"


def bench_peel(force_pure):
    g = complete_bipartite((9, 9))
    cur = g
    peeled = 0
    while True:
        cyc = CycleSearch(cur, force_pure=force_pure).first()
        if cyc is None:
            break
        cur = cur.minus_edges(cycle_edges(cyc))
        peeled += 1
    return f"{peeled} cycles peeled"


WORKLOADS = [
    ("enumerate K(6,6)", bench_enumerate),
    ("prescribed K(9,9) x10", bench_prescribed),
    ("peel K(9,9)", bench_peel),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if not HAVE_FAST:
        print("compiled kernel unavailable; timing the pure kernel only")
    header = f"{'workload':28s} {'pure':>10s} {'compiled':>10s} {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for name, fn in WORKLOADS:
        times = {}
        for label, force_pure in (("pure", True), ("compiled", False)):
            if label == "compiled" and not HAVE_FAST:
                times[label] = None
                continue
            best = min(
                _timed(fn, force_pure) for _ in range(args.repeat)
            )
            times[label] = best
        pure_t = times["pure"]
        fast_t = times["compiled"]
        speed = f"{pure_t / fast_t:8.1f}x" if fast_t else "      n/a"
        fast_s = f"{fast_t:9.3f}s" if fast_t else "      n/a"
        print(f"{name:28s} {pure_t:9.3f}s {fast_s} {speed}")


def _timed(fn, force_pure):
    t0 = time.perf_counter()
    fn(force_pure)
    return time.perf_counter() - t0


if __name__ == "__main__":
    main()
