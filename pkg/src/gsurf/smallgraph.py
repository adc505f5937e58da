"""Bit-level representation of small template graphs (at most 8 nodes).

A graph on ``s`` labelled nodes is an edge bitset over unordered pairs,
pair ``{i, j}`` (``i < j``) at bit ``j*(j-1)/2 + i``.  With this order the
bitset of a graph on nodes ``0..k-1`` does not change when nodes are added.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from . import kernels

MAX_NODES = 8


def pair_index(i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return j * (j - 1) // 2 + i


def n_pairs(s: int) -> int:
    return s * (s - 1) // 2


def adj_from_bits(s: int, bits: int) -> tuple[int, ...]:
    adj = [0] * s
    for j in range(1, s):
        base = j * (j - 1) // 2
        for i in range(j):
            if bits >> (base + i) & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return tuple(adj)


def bits_from_adj(adj) -> int:
    bits = 0
    for j in range(1, len(adj)):
        a = adj[j]
        base = j * (j - 1) // 2
        for i in range(j):
            if a >> i & 1:
                bits |= 1 << (base + i)
    return bits


def is_connected(s: int, adj) -> bool:
    if s == 0:
        return False
    full = (1 << s) - 1
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        frontier = nxt & ~seen
        seen |= nxt
    return seen == full


def mask_connected(adj, mask: int) -> bool:
    """Whether the nodes in ``mask`` induce a connected subgraph."""
    if not mask:
        return False
    seen = mask & -mask
    frontier = seen
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        nxt &= mask
        frontier = nxt & ~seen
        seen |= nxt
    return seen == mask


def induced_bits(adj, nodes) -> int:
    """Edge bitset of the subgraph induced on ``nodes`` (relabelled 0..k-1 in order)."""
    bits = 0
    for jj in range(1, len(nodes)):
        aj = adj[nodes[jj]]
        base = jj * (jj - 1) // 2
        for ii in range(jj):
            if aj >> nodes[ii] & 1:
                bits |= 1 << (base + ii)
    return bits


def permute_bits(s: int, bits: int, perm) -> int:
    """Relabel node ``v`` as ``perm[v]``."""
    out = 0
    for j in range(1, s):
        base = j * (j - 1) // 2
        for i in range(j):
            if bits >> (base + i) & 1:
                out |= 1 << pair_index(perm[i], perm[j])
    return out


@dataclass(frozen=True)
class SmallGraph:
    s: int
    bits: int

    @classmethod
    def from_edges(cls, s: int, edges) -> "SmallGraph":
        bits = 0
        for i, j in edges:
            if i == j:
                raise ValueError("self-loop in template graph")
            bits |= 1 << pair_index(i, j)
        return cls(s, bits)

    @cached_property
    def adj(self) -> tuple[int, ...]:
        return adj_from_bits(self.s, self.bits)

    @property
    def m(self) -> int:
        return bin(self.bits).count("1")

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in combinations(range(self.s), 2) if self.bits >> pair_index(i, j) & 1]

    def degrees(self) -> tuple[int, ...]:
        return tuple(bin(a).count("1") for a in self.adj)

    def is_connected(self) -> bool:
        return is_connected(self.s, self.adj)

    def is_clique(self) -> bool:
        return self.m == n_pairs(self.s)

    def canonical(self):
        """``(canonical_bits, pos, aut_order, orbit_min)``; see ``kernels.canonical_form``."""
        return kernels.canonical_form(self.s, self.adj)

    def relabel(self, perm) -> "SmallGraph":
        return SmallGraph(self.s, permute_bits(self.s, self.bits, perm))
