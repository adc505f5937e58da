"""The graphlet inclusion poset with a null element, and its Hasse diagram."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .atlas import Atlas, AtlasError, GraphletId

NULL = GraphletId(0, 0, 0)


def _embeds(ai, si, aj, sj, x=None, targets=0) -> bool:
    """Whether an injective edge-preserving map ``H_i -> H_j`` exists; with
    ``x`` given, one that sends ``x`` into the node set ``targets``."""
    start = 0 if x is None else x
    order = [start]
    seen = 1 << start
    while len(order) < si:
        u = next(u for u in range(si) if not seen >> u & 1 and ai[u] & seen)
        order.append(u)
        seen |= 1 << u
    img = [-1] * si

    def rec(t, used):
        if t == si:
            return True
        u = order[t]
        cand = ((1 << sj) - 1) & ~used
        if t == 0 and x is not None:
            cand &= targets
        while cand:
            low = cand & -cand
            c = low.bit_length() - 1
            cand ^= low
            if all(aj[c] >> img[w] & 1 for w in order[:t] if ai[u] >> w & 1):
                img[u] = c
                if rec(t + 1, used | low):
                    return True
                img[u] = -1
        return False

    return rec(0, 0)


@lru_cache(maxsize=None)
def _subgraph_cached(ai, si, oi, aj, sj, oj) -> bool:
    if oi is None:
        return _embeds(ai, si, aj, sj)
    x = oi[0]
    return _embeds(ai, si, aj, sj, x, oj)


def is_subgraph(atlas: Atlas, gi, gj) -> bool:
    """``gi`` embeds into ``gj`` (graphlet ids; ``sigma = 0`` ignores orbits).

    Orbit form: some node of the designated orbit of ``gi`` lands on a node
    of the designated orbit of ``gj``.  The null element embeds everywhere.
    Reflexive: a graphlet embeds into itself.
    """
    gi, gj = GraphletId(*gi), GraphletId(*gj)
    if gi == NULL:
        return True
    if gj == NULL:
        return False
    pi, pj = atlas.pattern(gi.s, gi.p), atlas.pattern(gj.s, gj.p)
    if (gi.sigma == 0) != (gj.sigma == 0):
        raise AtlasError("cannot compare hatted and orbit graphlets")
    if pi.s > pj.s or pi.m > pj.m:
        return False
    if gi.sigma == 0:
        return _subgraph_cached(pi.adj, pi.s, None, pj.adj, pj.s, None)
    targets = 0
    for v in pj.members(gj.sigma):
        targets |= 1 << v
    return _subgraph_cached(pi.adj, pi.s, pi.members(gi.sigma), pj.adj, pj.s, targets)


@dataclass(frozen=True)
class GraphletLattice:
    elements: tuple[GraphletId, ...]  # element 0 is the null graph
    precedes: np.ndarray  # bool, precedes[a, b] iff a < b strictly
    covers: tuple[tuple[int, int], ...]
    layer: tuple[int, ...]
    mode: str
    cliques: frozenset  # element indices of complete graphs

    def index(self, gid) -> int:
        return self.elements.index(GraphletId(*gid))

    @property
    def height(self) -> int:
        return max(self.layer)

    def layers(self) -> dict[int, list[GraphletId]]:
        out: dict[int, list[GraphletId]] = {}
        for e, l in zip(self.elements, self.layer):
            out.setdefault(l, []).append(e)
        return out

    def restrict(self, s: int) -> "GraphletLattice":
        """Null plus family ``s`` only."""
        keep = [0] + [i for i, e in enumerate(self.elements) if e.s == s]
        sub = self.precedes[np.ix_(keep, keep)]
        return _from_order(
            tuple(self.elements[i] for i in keep),
            sub,
            tuple(self.layer[i] for i in keep),
            self.mode,
            frozenset(k for k, i in enumerate(keep) if i in self.cliques),
        )


def transitive_reduction(prec: np.ndarray) -> np.ndarray:
    p = prec.astype(np.int64)
    two_step = (p @ p) > 0
    return prec & ~two_step


def _from_order(elements, prec, layer, mode, cliques) -> GraphletLattice:
    red = transitive_reduction(prec)
    covers = tuple((int(a), int(b)) for a, b in zip(*np.nonzero(red)))
    return GraphletLattice(tuple(elements), prec, covers, tuple(layer), mode, cliques)


def build_lattice(atlas: Atlas, t: int, mode: str = "orbit") -> GraphletLattice:
    if t > atlas.s_max:
        raise AtlasError(f"t={t} exceeds atlas families (s_max={atlas.s_max})")
    if mode not in ("orbit", "hatted"):
        raise ValueError(f"unknown mode {mode!r}")
    elements = [NULL] + atlas.ids(t, mode)
    N = len(elements)
    pats = [None] + [atlas.pattern(e.s, e.p) for e in elements[1:]]
    prec = np.zeros((N, N), dtype=bool)
    prec[0, 1:] = True
    for a in range(1, N):
        for b in range(1, N):
            if pats[a].m < pats[b].m and is_subgraph(atlas, elements[a], elements[b]):
                prec[a, b] = True
    layer = [0] + [p.m + 1 for p in pats[1:]]
    cliques = frozenset(i for i in range(1, N) if pats[i].is_clique())
    return _from_order(elements, prec, layer, mode, cliques)


def _node_name(e: GraphletId) -> str:
    return "null" if e == NULL else f"H_{e.s}_{e.p}_{e.sigma}"


def _node_label(e: GraphletId) -> str:
    if e == NULL:
        return "null"
    return f"{e.s},{e.p}" if e.sigma == 0 else f"{e.s},{e.p},{e.sigma}"


def hasse_dot(lat: GraphletLattice) -> str:
    lines = ["digraph hasse {", "  rankdir=LR;", "  node [shape=circle, fontsize=10];"]
    for i, e in enumerate(lat.elements):
        shape = "square" if i in lat.cliques else ("point" if e == NULL else "circle")
        lines.append(f'  {_node_name(e)} [label="{_node_label(e)}", shape={shape}];')
    for l, members in sorted(lat.layers().items()):
        names = "; ".join(_node_name(e) for e in members)
        lines.append(f"  {{ rank=same; {names}; }}  // layer {l}")
    for a, b in lat.covers:
        lines.append(f"  {_node_name(lat.elements[a])} -> {_node_name(lat.elements[b])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_hasse(lat: GraphletLattice, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(hasse_dot(lat))
