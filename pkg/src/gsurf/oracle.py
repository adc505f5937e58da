"""Brute-force reference counts, for verification only.

Every connected vertex subset of size ``<= t`` is visited exactly once
(ESU-style growth from its smallest vertex with an exclusive extension set),
its induced pattern is classified for net counts, and each of its connected
spanning edge subsets is classified for gross counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .atlas import Atlas, GraphletId, build_atlas
from .graph import SourceGraph
from .smallgraph import adj_from_bits, is_connected, pair_index

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class OracleResult:
    order: list[GraphletId]
    net: np.ndarray  # n x len(order), object ints
    gross: np.ndarray | None
    global_net: dict = field(default_factory=dict)  # (s, p) -> induced copies
    global_gross: dict = field(default_factory=dict)
    labels: tuple = ()

    def column(self, gid, kind="net") -> np.ndarray:
        j = self.order.index(GraphletId(*gid))
        return (self.net if kind == "net" else self.gross)[:, j]


def connected_subsets(g: SourceGraph, k_max: int):
    """Yield each connected vertex subset of size ``<= k_max`` once, as a list."""
    nbrs = [set(g.neighbors(v).tolist()) for v in range(g.n)]

    def extend(sub, closed, ext, v):
        yield sub
        if len(sub) == k_max:
            return
        ext = list(ext)
        while ext:
            w = ext.pop()
            new = [u for u in nbrs[w] if u > v and u not in closed]
            yield from extend(sub + [w], closed | nbrs[w] | {w}, ext + new, v)

    for v in range(g.n):
        start = [u for u in nbrs[v] if u > v]
        yield from extend([v], nbrs[v] | {v}, start, v)


def _check_budget(n, t, budget):
    total = sum(comb(n, s) for s in range(1, t + 1))
    if total > budget:
        raise BudgetExceeded(f"sum of C({n}, s) for s <= {t} is {total} > budget {budget}")


def _run(g: SourceGraph, t: int, atlas: Atlas | None, budget: int, gross: bool) -> OracleResult:
    if not 1 <= t <= 8:
        raise ValueError("t must be in 1..8")
    _check_budget(g.n, t, budget)
    atlas = atlas or build_atlas(t)
    order = atlas.ids(t, "orbit")
    col = {g_: i for i, g_ in enumerate(order)}
    net = np.zeros((g.n, len(order)), dtype=object)
    grs = np.zeros((g.n, len(order)), dtype=object) if gross else None
    gnet: dict = {}
    ggross: dict = {}
    nbrs = [set(g.neighbors(v).tolist()) for v in range(g.n)]
    for sub in connected_subsets(g, t):
        k = len(sub)
        bits = 0
        for j in range(1, k):
            nj = nbrs[sub[j]]
            for i in range(j):
                if sub[i] in nj:
                    bits |= 1 << pair_index(i, j)
        p, orbits = atlas.classify(k, bits)
        for v, o in zip(sub, orbits):
            net[v, col[(k, p, o)]] += 1
        gnet[(k, p)] = gnet.get((k, p), 0) + 1
        if not gross:
            continue
        es = bits
        while True:
            if k == 1 or is_connected(k, adj_from_bits(k, es)):
                p2, orb2 = atlas.classify(k, es)
                for v, o in zip(sub, orb2):
                    grs[v, col[(k, p2, o)]] += 1
                ggross[(k, p2)] = ggross.get((k, p2), 0) + 1
            if es == 0:
                break
            es = (es - 1) & bits
    return OracleResult(order, net, grs, gnet, ggross, g.labels)


def brute_net(g: SourceGraph, t: int, atlas: Atlas | None = None, budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Induced (net) orbit counts at every vertex for all graphlets of ``L_t``."""
    return _run(g, t, atlas, budget, gross=False)


def brute_gross(g: SourceGraph, t: int, atlas: Atlas | None = None, budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Net and gross (all copies) orbit counts for all graphlets of ``L_t``."""
    return _run(g, t, atlas, budget, gross=True)


def write_csv(res: OracleResult, path, tag: str = "oracle") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# source {tag}\n")
        fh.write("vertex_label,graphlet_s,graphlet_p,graphlet_sigma,net_count\n")
        for v in range(res.net.shape[0]):
            lab = res.labels[v] if res.labels else v
            for j, gid in enumerate(res.order):
                fh.write(f"{lab},{gid.s},{gid.p},{gid.sigma},{res.net[v, j]}\n")
