"""Graphlet families, automorphism orbits and the SEIRA total order.

Family ``s`` is generated from family ``s-1`` by attaching one new node to
every nonempty subset of nodes (every connected graph has a non-cut node,
so this reaches all of them) and keeping one canonical representative per
isomorphism class.

Patterns of one family are ordered by edge count; equal edge counts are
separated by comparing, graphlet by graphlet in SEIRA order over all
smaller families, the non-decreasingly sorted per-node net counts of that
graphlet inside each pattern.  Orbits within a pattern are ordered the same
way using the count vector at one node of each orbit.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from functools import cached_property, cmp_to_key, lru_cache
from typing import Iterator, NamedTuple

from . import kernels
from .smallgraph import (
    MAX_NODES,
    SmallGraph,
    adj_from_bits,
    induced_bits,
    mask_connected,
    pair_index,
)

log = logging.getLogger(__name__)

ATLAS_FORMAT = "gsurf-atlas v1"


class GraphletId(NamedTuple):
    """``(s, p, sigma)``; ``sigma == 0`` names the pattern without an orbit."""

    s: int
    p: int
    sigma: int

    def __str__(self) -> str:
        return f"H_{self.s},{self.p},{self.sigma}"


class AtlasError(ValueError):
    pass


@dataclass(frozen=True)
class Pattern:
    """One isomorphism class, stored in its canonical labelling."""

    s: int
    p: int
    bits: int
    orbit_of: tuple[int, ...]
    aut: int

    @cached_property
    def graph(self) -> SmallGraph:
        return SmallGraph(self.s, self.bits)

    @property
    def adj(self) -> tuple[int, ...]:
        return self.graph.adj

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def n_orbits(self) -> int:
        return max(self.orbit_of)

    def members(self, sigma: int) -> tuple[int, ...]:
        return tuple(v for v, o in enumerate(self.orbit_of) if o == sigma)

    def rep(self, sigma: int) -> int:
        """Smallest node of orbit ``sigma``."""
        return self.orbit_of.index(sigma)

    def is_clique(self) -> bool:
        return self.graph.is_clique()

    def gid(self, sigma: int = 0) -> GraphletId:
        return GraphletId(self.s, self.p, sigma)


def _orbit_classes(orbit_min) -> list[list[int]]:
    classes: dict[int, list[int]] = {}
    for v, r in enumerate(orbit_min):
        classes.setdefault(r, []).append(v)
    return [classes[r] for r in sorted(classes)]


class Atlas:
    """SEIRA-ordered graphlet families ``1..s_max``.  Immutable once built."""

    def __init__(self, families: dict[int, list[Pattern]], tie_events: list[str] | None = None):
        self.families = families
        self.tie_events = list(tie_events or [])
        self._canon_index = {(s, pat.bits): pat.p for s, fam in families.items() for pat in fam}
        self._memo: dict[int, dict[int, tuple[int, tuple[int, ...]]]] = {}

    # ------------------------------------------------------------ queries
    @property
    def s_max(self) -> int:
        return max(self.families)

    def family(self, s: int) -> list[Pattern]:
        if s not in self.families:
            raise AtlasError(f"family s={s} not in atlas (s_max={self.s_max})")
        return self.families[s]

    def pattern(self, s: int, p: int) -> Pattern:
        fam = self.family(s)
        if not 1 <= p <= len(fam):
            raise AtlasError(f"no pattern p={p} in family s={s}")
        return fam[p - 1]

    def n_patterns(self, s: int) -> int:
        return len(self.family(s))

    def n_graphlets(self, s: int) -> int:
        return sum(pat.n_orbits for pat in self.family(s))

    def family_ids(self, s: int, mode: str = "orbit") -> list[GraphletId]:
        if mode == "hatted":
            return [pat.gid(0) for pat in self.family(s)]
        if mode != "orbit":
            raise ValueError(f"unknown mode {mode!r}")
        return [pat.gid(o) for pat in self.family(s) for o in range(1, pat.n_orbits + 1)]

    def ids(self, t: int, mode: str = "orbit", start: int = 1) -> list[GraphletId]:
        """All graphlets of families ``start..t`` in SEIRA order."""
        return [g for s in range(start, t + 1) for g in self.family_ids(s, mode)]

    def lookup(self, gid) -> tuple[SmallGraph, tuple[int, ...]]:
        """Graph and orbit vector; for ``sigma >= 1`` the orbit must exist."""
        s, p, sigma = gid
        pat = self.pattern(s, p)
        if sigma < 0 or sigma > pat.n_orbits:
            raise AtlasError(f"no orbit sigma={sigma} in pattern ({s},{p})")
        return pat.graph, pat.orbit_of

    def classify(self, k: int, bits: int) -> tuple[int, tuple[int, ...]] | None:
        """Pattern index and per-node orbit of a labelled ``k``-node graph.

        ``None`` for a disconnected graph.
        """
        memo = self._memo.setdefault(k, {})
        hit = memo.get(bits)
        if hit is not None or bits in memo:
            return hit
        adj = adj_from_bits(k, bits)
        cbits, pos, _, _ = kernels.canonical_form(k, adj)
        p = self._canon_index.get((k, cbits))
        if p is None:
            # disconnected (or a family missing from the atlas)
            if k in self.families and SmallGraph(k, bits).is_connected():
                raise AtlasError("connected graph missing from atlas")
            memo[bits] = None
            return None
        pat = self.families[k][p - 1]
        res = (p, tuple(pat.orbit_of[pos[v]] for v in range(k)))
        memo[bits] = res
        return res

    def classify_graph(self, g: SmallGraph) -> tuple[int, tuple[int, ...]] | None:
        return self.classify(g.s, g.bits)

    # ------------------------------------------------------------ export
    def records(self) -> Iterator[str]:
        for s in sorted(self.families):
            for pat in self.families[s]:
                orb = ",".join(str(o) for o in pat.orbit_of)
                for sigma in range(pat.n_orbits + 1):
                    yield f"{s} {pat.p} {sigma} {pat.m} {pat.bits:x} {orb} {pat.aut}"

    @cached_property
    def hash(self) -> str:
        h = hashlib.sha256()
        for rec in self.records():
            h.update(rec.encode())
            h.update(b"\n")
        return h.hexdigest()[:16]

    def export(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# {ATLAS_FORMAT} s_max={self.s_max} hash={self.hash}\n")
            fh.write("# columns: s p sigma m edge_bitset_hex orbit_vector automorphism_count\n")
            for ev in self.tie_events:
                fh.write(f"# tie {ev}\n")
            for rec in self.records():
                fh.write(rec + "\n")

    @classmethod
    def load(cls, path) -> "Atlas":
        families: dict[int, list[Pattern]] = {}
        ties = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if line.startswith("# tie "):
                    ties.append(line[6:])
                if not line or line.startswith("#"):
                    continue
                try:
                    s, p, sigma, m, hx, orb, aut = line.split()
                    s, p, sigma, m, aut = int(s), int(p), int(sigma), int(m), int(aut)
                    bits = int(hx, 16)
                    orbit_of = tuple(int(x) for x in orb.split(","))
                except ValueError as exc:
                    raise AtlasError(f"line {lineno}: malformed record") from exc
                if sigma:
                    continue
                fam = families.setdefault(s, [])
                if p != len(fam) + 1:
                    raise AtlasError(f"line {lineno}: patterns out of order")
                pat = Pattern(s, p, bits, orbit_of, aut)
                if pat.m != m or len(orbit_of) != s:
                    raise AtlasError(f"line {lineno}: inconsistent record")
                if kernels.canonical_form(s, pat.adj)[0] != bits:
                    raise AtlasError(f"line {lineno}: bitset is not in canonical form")
                fam.append(pat)
        return cls(families, ties)


# ---------------------------------------------------------------- generation


def _extend(parent_bits: int, s: int) -> Iterator[int]:
    """All graphs obtained by attaching node ``s-1`` to a nonempty subset."""
    new = s - 1
    for x in range(1, 1 << new):
        bits = parent_bits
        for i in range(new):
            if x >> i & 1:
                bits |= 1 << pair_index(i, new)
        yield bits


def enumerate_family(s: int, previous: list[Pattern] | None = None) -> dict[int, tuple]:
    """Canonical bitsets of all connected ``s``-node graphs, unordered.

    Maps canonical bitset to ``(aut_order, orbit classes)`` where the orbit
    classes refer to the canonical labelling.  ``previous`` is family ``s-1``.
    """
    if not 1 <= s <= MAX_NODES:
        raise AtlasError(f"family size s={s} outside 1..{MAX_NODES}")
    if s == 1:
        seeds = [0]
    elif s == 2:
        seeds = [1]
    else:
        if previous is None:
            raise AtlasError("family s-1 required")
        seen = set()
        for pat in previous:
            for bits in _extend(pat.bits, s):
                cbits = kernels.canonical_form(s, adj_from_bits(s, bits))[0]
                seen.add(cbits)
        seeds = sorted(seen)
    out = {}
    for cbits in seeds:
        _, _, aut, orbit_min = kernels.canonical_form(s, adj_from_bits(s, cbits))
        out[cbits] = (aut, _orbit_classes(orbit_min))
    return out


def _precedent_counts(atlas: Atlas, s: int, bits: int, prec_index) -> list[dict[int, int]]:
    """Per node: net counts of every smaller orbit graphlet inside the graph."""
    adj = adj_from_bits(s, bits)
    counts: list[dict[int, int]] = [dict() for _ in range(s)]
    full = (1 << s) - 1
    for mask in range(1, full):
        if not mask_connected(adj, mask):
            continue
        nodes = [v for v in range(s) if mask >> v & 1]
        k = len(nodes)
        p, orbits = atlas.classify(k, induced_bits(adj, nodes))
        for v, o in zip(nodes, orbits):
            key = prec_index[(k, p, o)]
            c = counts[v]
            c[key] = c.get(key, 0) + 1
    return counts


def _cmp_sequences(ca, cb, nodes_a, nodes_b) -> int:
    keys = set()
    for v in nodes_a:
        keys.update(ca[v])
    for v in nodes_b:
        keys.update(cb[v])
    for k in sorted(keys):
        sa = sorted(ca[v].get(k, 0) for v in nodes_a)
        sb = sorted(cb[v].get(k, 0) for v in nodes_b)
        if sa != sb:
            return -1 if sa < sb else 1
    return 0


def _cmp_vectors(a: dict[int, int], b: dict[int, int]) -> int:
    for k in sorted(set(a) | set(b)):
        x, y = a.get(k, 0), b.get(k, 0)
        if x != y:
            return -1 if x < y else 1
    return 0


def seira_order(atlas: Atlas, s: int, found: dict[int, tuple]) -> tuple[list[Pattern], list[str]]:
    """Order the patterns of family ``s`` and number their orbits.

    ``atlas`` must already hold families ``1..s-1``.  Residual ties (none
    occur for s <= 7) fall back to the canonical bitset / node order and are
    reported in the returned event list.
    """
    prec = atlas.ids(s - 1, "orbit") if s > 1 else []
    prec_index = {tuple(g): i for i, g in enumerate(prec)}
    events: list[str] = []
    cand = []
    for bits, (aut, classes) in found.items():
        counts = _precedent_counts(atlas, s, bits, prec_index) if s > 1 else [{}]
        cand.append((bits, aut, classes, counts, bin(bits).count("1")))

    def cmp_pattern(x, y):
        if x[4] != y[4]:
            return -1 if x[4] < y[4] else 1
        c = _cmp_sequences(x[3], y[3], range(s), range(s))
        if c:
            return c
        events.append(f"s={s} pattern tie {x[0]:x}/{y[0]:x} broken by bitset")
        return -1 if x[0] < y[0] else (1 if x[0] > y[0] else 0)

    cand.sort(key=cmp_to_key(cmp_pattern))

    patterns = []
    for p, (bits, aut, classes, counts, _) in enumerate(cand, 1):

        def cmp_orbit(a, b, counts=counts, bits=bits):
            c = _cmp_vectors(counts[a[0]], counts[b[0]])
            if c:
                return c
            events.append(f"s={s} p={p} orbit tie at nodes {a[0]}/{b[0]} of {bits:x}")
            return -1 if a[0] < b[0] else 1

        ordered = sorted(classes, key=cmp_to_key(cmp_orbit))
        orbit_of = [0] * s
        for sigma, members in enumerate(ordered, 1):
            for v in members:
                orbit_of[v] = sigma
        patterns.append(Pattern(s, p, bits, tuple(orbit_of), aut))
    # dedupe repeated tie messages from the sort's pairwise comparisons
    return patterns, sorted(set(events))


@lru_cache(maxsize=None)
def build_atlas(s_max: int) -> Atlas:
    """Families ``1..s_max``; ``s_max <= 8``.  Cached per ``s_max``."""
    if not 1 <= s_max <= MAX_NODES:
        raise AtlasError(f"s_max={s_max} outside 1..{MAX_NODES}")
    if s_max > 1:
        base = build_atlas(s_max - 1)
        families = dict(base.families)
        events = list(base.tie_events)
    else:
        base, families, events = Atlas({}), {}, []
    found = enumerate_family(s_max, families.get(s_max - 1))
    ordered, ev = seira_order(base, s_max, found)
    for e in ev:
        log.warning("SEIRA residual tie: %s", e)
    families[s_max] = ordered
    return Atlas(families, events + ev)
