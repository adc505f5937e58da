"""Compiled vs pure-Python kernels on preferential-attachment graphs.

    python benchmarks/bench_kernels.py --n 2000 --t 4 --repeat 3

Each case runs once per backend and reports the best wall time of
``--repeat`` runs. Outputs are compared for equality so a speedup is never
reported for a kernel that disagrees.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gsurf import kernels
from gsurf.atlas import build_atlas
from gsurf.conversion import MatrixBundle
from gsurf.engine import run
from gsurf.graph import SourceGraph
from gsurf.homcount import GraphArrays, family_plans, hom_counts


def preferential_attachment(n: int, k: int, seed: int) -> SourceGraph:
    """Barabasi-Albert style graph: every new vertex links to ``k`` distinct
    earlier vertices drawn proportionally to degree."""
    rng = np.random.default_rng(seed)
    pool = list(range(k))
    edges = []
    for v in range(k, n):
        targets = set()
        while len(targets) < k:
            targets.add(pool[rng.integers(len(pool))])
        for u in targets:
            edges.append((u, v))
        pool.extend(targets)
        pool.extend([v] * k)
    return SourceGraph.from_edges(edges, n=n)


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def with_backend(compiled: bool, fn):
    saved = kernels._ckernels
    if not compiled:
        kernels._ckernels = None
    try:
        return fn()
    finally:
        kernels._ckernels = saved


def cases(g, t, bundle):
    ga = GraphArrays(g)
    roots = np.arange(g.n, dtype=np.int64)
    atlas = bundle.atlas
    yield f"clique_counts s={t}", lambda: kernels.clique_counts(g.indptr, g.indices, roots, t)
    for s in range(3, t + 1):
        plans = family_plans(atlas, s)
        yield f"hom_counts family {s} ({len(plans)} plans)", lambda plans=plans: [
            hom_counts(ga, p, roots) for p in plans
        ]
    yield f"engine run t={t}", lambda: run(g, t, bundle=bundle)[0].values


def same(a, b):
    if isinstance(a, list):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--k", type=int, default=3, help="edges per new vertex")
    ap.add_argument("--t", type=int, default=4, choices=range(3, 6))
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    if kernels._ckernels is None:
        raise SystemExit("compiled extension not available; build with `pip install -e . --no-build-isolation`")

    g = preferential_attachment(args.n, args.k, args.seed)
    bundle = MatrixBundle.build(build_atlas(args.t), args.t, "orbit")
    print(f"graph n={g.n} m={g.m} max_degree={g.max_degree}  t={args.t}  repeat={args.repeat}")
    print(f"{'case':<34} {'cython s':>10} {'python s':>10} {'speedup':>8}  equal")
    for name, fn in cases(g, args.t, bundle):
        tc, oc = with_backend(True, lambda: best_of(fn, args.repeat))
        tp, op = with_backend(False, lambda: best_of(fn, args.repeat))
        print(f"{name:<34} {tc:>10.3f} {tp:>10.3f} {tp / tc:>7.1f}x  {same(oc, op)}")


if __name__ == "__main__":
    main()
