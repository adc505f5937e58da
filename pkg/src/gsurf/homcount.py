"""Gross orbit counts from rooted homomorphism counts.

For a rooted pattern ``F`` (root ``r`` in orbit ``sigma``) every homomorphism
into the source graph factors through a unique partition of ``V(F)`` into
independent sets, so

    inj_F(v) = hom_F(v) - sum over nontrivial partitions pi of inj_{F/pi}(v)

and each quotient has fewer nodes, so its injective count is a fixed linear
combination of already known net counts.  Finally
``gross_F(v) = inj_F(v) / |Stab(r)|``.

``hom_F`` is evaluated by folding away pendant nodes (into vertex weights)
and nodes of degree two whose neighbors are adjacent (into arc weights over
triangles), then running a weighted backtracking count on what is left.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .atlas import Atlas, GraphletId
from .conversion import _embed_count


def set_partitions(n: int):
    """Restricted growth strings of length ``n``."""
    a = [0] * n

    def rec(i, mx):
        if i == n:
            yield tuple(a)
            return
        for b in range(mx + 2):
            a[i] = b
            yield from rec(i + 1, max(mx, b))

    if n == 0:
        yield ()
        return
    yield from rec(1, 0)


@dataclass(frozen=True)
class HomPlan:
    gid: GraphletId
    adj: tuple[int, ...]
    root: int
    stab: int
    coef: np.ndarray  # correction weights over all graphlets of smaller families


def _quotient(adj, s, blocks):
    k = max(blocks) + 1
    qadj = [0] * k
    for u in range(s):
        for w in range(s):
            if adj[u] >> w & 1:
                a, b = blocks[u], blocks[w]
                if a == b:
                    return None
                qadj[a] |= 1 << b
    return tuple(qadj), k


def correction_coefficients(atlas: Atlas, s: int, p: int, root: int) -> np.ndarray:
    """Weights ``c`` with ``hom_F - inj_F = c . f_prec`` for the rooted pattern."""
    pat = atlas.pattern(s, p)
    prec = atlas.ids(s - 1, "orbit")
    index = {g: i for i, g in enumerate(prec)}
    coef = np.zeros(len(prec), dtype=np.int64)
    for blocks in set_partitions(s):
        if max(blocks) == s - 1:
            continue  # identity partition
        q = _quotient(pat.adj, s, blocks)
        if q is None:
            continue
        qadj, k = q
        for j, n in _injective_profile(atlas, k, qadj, blocks[root]):
            coef[index[j]] += n
    return coef


@lru_cache(maxsize=None)
def _injective_profile_cached(atlas_id, k, qadj, qroot):
    atlas = _ATLASES[atlas_id]
    out = []
    for hp in atlas.family(k):
        for o in range(1, hp.n_orbits + 1):
            n = _embed_count(qadj, k, hp.adj, k, False, qroot, hp.rep(o))
            if n:
                out.append((hp.gid(o), n))
    return tuple(out)


_ATLASES: dict[int, Atlas] = {}


def _injective_profile(atlas, k, qadj, qroot):
    _ATLASES[id(atlas)] = atlas
    return _injective_profile_cached(id(atlas), k, qadj, qroot)


def make_plan(atlas: Atlas, gid) -> HomPlan:
    s, p, sigma = gid
    pat = atlas.pattern(s, p)
    root = pat.rep(sigma)
    stab = pat.aut // len(pat.members(sigma))
    return HomPlan(GraphletId(s, p, sigma), pat.adj, root, stab, correction_coefficients(atlas, s, p, root))


@lru_cache(maxsize=None)
def _plans_cached(atlas_id, s):
    atlas = _ATLASES[atlas_id]
    return tuple(make_plan(atlas, g) for g in atlas.family_ids(s, "orbit") if not atlas.pattern(g.s, g.p).is_clique())


def family_plans(atlas: Atlas, s: int) -> tuple[HomPlan, ...]:
    """Plans for every non-clique orbit graphlet of family ``s``, SEIRA order."""
    _ATLASES[id(atlas)] = atlas
    return _plans_cached(id(atlas), s)


class GraphArrays:
    """CSR arrays plus the arc reversal map, shared by all plans."""

    def __init__(self, g, dtype=np.int64):
        self.g = g
        self.n = g.n
        self.indptr = g.indptr
        self.indices = g.indices
        self.rev = g.reverse_positions()
        self.dtype = dtype
        self.n_arcs = len(g.indices)

    def ones_v(self):
        return np.ones(self.n, dtype=self.dtype)

    def ones_e(self):
        return np.ones(self.n_arcs, dtype=self.dtype)

    def segment_sum(self, vals):
        cs = np.zeros(self.n_arcs + 1, dtype=self.dtype)
        if self.n_arcs:
            cs[1:] = np.cumsum(vals)
        # int64 wrap-around cancels in the difference when the result fits
        return cs[self.indptr[1:]] - cs[self.indptr[:-1]]


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _components(adj, alive: int) -> list[int]:
    out = []
    left = alive
    while left:
        comp = left & -left
        frontier = comp
        while frontier:
            nxt = 0
            for u in _bits(frontier):
                nxt |= adj[u]
            nxt &= left & ~comp
            comp |= nxt
            frontier = nxt
        out.append(comp)
        left &= ~comp
    return out


class _Weights:
    """Vertex weights and arc weights attached to pattern vertices/edges."""

    def __init__(self, ga: GraphArrays, vw=None, ew=None):
        self.ga = ga
        self.vw: dict[int, np.ndarray] = dict(vw or {})
        self.ew: dict[tuple[int, int], np.ndarray] = dict(ew or {})  # (a, b): arc img(a) -> img(b)

    def get_ew(self, a, b):
        if (a, b) in self.ew:
            return self.ew[(a, b)]
        if (b, a) in self.ew:
            return self.ew[(b, a)][self.ga.rev]
        return None

    def mul_ew(self, a, b, arr):
        cur = self.get_ew(a, b)
        self.drop_ew(a, b)
        self.ew[(a, b)] = arr if cur is None else cur * arr

    def drop_ew(self, a, b):
        self.ew.pop((a, b), None)
        self.ew.pop((b, a), None)

    def restrict(self, keep: int, root_weight: bool = True, root: int = -1) -> "_Weights":
        vw = {u: w for u, w in self.vw.items() if keep >> u & 1 and (root_weight or u != root)}
        ew = {k: w for k, w in self.ew.items() if keep >> k[0] & 1 and keep >> k[1] & 1}
        return _Weights(self.ga, vw, ew)

    def vertex(self, u):
        w = self.vw.get(u)
        return self.ga.ones_v() if w is None else w


def _eliminate(ga, adj, alive, root, wts: _Weights) -> int:
    """Fold pendant nodes and ears (other than the root) into weights."""
    while True:
        for x in _bits(alive & ~(1 << root)):
            nb = adj[x] & alive
            deg = bin(nb).count("1")
            if deg == 1:
                y = nb.bit_length() - 1
                vals = wts.vertex(x)[ga.indices]
                e = wts.get_ew(y, x)
                if e is not None:
                    vals = vals * e
                seg = ga.segment_sum(vals)
                wts.vw[y] = seg if y not in wts.vw else wts.vw[y] * seg
                break
            if deg == 2:
                a = (nb & -nb).bit_length() - 1
                b = (nb ^ (1 << a)).bit_length() - 1
                if adj[a] >> b & 1:
                    ea = wts.get_ew(a, x)
                    eb = wts.get_ew(b, x)
                    ea = ga.ones_e() if ea is None else ea
                    eb = ga.ones_e() if eb is None else eb
                    tri = kernels.edge_triangle_sums(ga.indptr, ga.indices, wts.vertex(x), ea, eb)
                    wts.mul_ew(a, b, tri)
                    break
        else:
            return alive
        wts.vw.pop(x, None)
        for u in _bits(adj[x] & alive):
            wts.drop_ew(u, x)
        alive &= ~(1 << x)


def _core_order(adj, alive, root, chan_targets=0) -> list[int]:
    """Root first, then greedily the node with most placed neighbors; nodes
    reached only through channels (two-hop sums from the root) come last."""
    order = [root]
    placed = 1 << root
    while placed != alive:
        best, score = -1, -1
        for u in _bits(alive & ~placed):
            c = bin(adj[u] & placed).count("1")
            if c == 0 and not chan_targets >> u & 1:
                continue
            if c > score:
                best, score = u, c
        order.append(best)
        placed |= 1 << best
    return order


def _hom(ga, adj, alive, root, wts: _Weights, roots, workers):
    alive = _eliminate(ga, adj, alive, root, wts)
    rest = alive & ~(1 << root)
    if not rest:
        return wts.vertex(root)[roots]
    comps = _components(adj, rest)
    if len(comps) > 1:
        # the root is a cut node: the counts of the pieces multiply
        out = None
        for i, comp in enumerate(comps):
            keep = comp | (1 << root)
            h = _hom(ga, adj, keep, root, wts.restrict(keep, i == 0, root), roots, workers)
            out = h if out is None else out * h
        return out
    nb = adj[root] & alive
    if nb & (nb - 1) == 0:
        # pendant root: count the rest rooted at its neighbor everywhere, then sum
        y = nb.bit_length() - 1
        w_rest = _hom(ga, adj, rest, y, wts.restrict(rest), np.arange(ga.n, dtype=np.int64), workers)
        vals = w_rest[ga.indices]
        e = wts.get_ew(root, y)
        if e is not None:
            vals = vals * e
        seg = ga.segment_sum(vals)
        return (wts.vertex(root) * seg)[roots]
    return _core(ga, adj, alive, root, wts, roots, workers)


def _core(ga, adj, alive, root, wts, roots, workers):
    # degree-2 nodes between the root and a non-neighbor of the root become
    # channels: per-root two-hop sums attached to that non-neighbor
    chans = []
    for x in _bits(alive & ~(1 << root)):
        nb = adj[x] & alive
        if bin(nb).count("1") == 2 and nb >> root & 1:
            b = (nb & ~(1 << root)).bit_length() - 1
            if not adj[root] >> b & 1:
                chans.append((x, b))
    for x, _ in chans:
        alive &= ~(1 << x)
    targets = 0
    for _, b in chans:
        targets |= 1 << b
    core = _core_order(adj, alive, root, targets)
    k = len(core)
    pos = {u: i for i, u in enumerate(core)}
    vwm = np.ones((k, ga.n), dtype=ga.dtype)
    for i, u in enumerate(core):
        if u in wts.vw:
            vwm[i] = wts.vw[u]
    nbr = np.zeros((k, k), dtype=np.int8)
    eidx = np.full((k, k), -1, dtype=np.intc)
    arrays = []
    for j in range(1, k):
        for i in range(j):
            if adj[core[i]] >> core[j] & 1:
                nbr[j, i] = 1
                e = wts.get_ew(core[i], core[j])
                if e is not None:
                    eidx[j, i] = len(arrays)
                    arrays.append(e)
    if arrays:
        ewm = np.ascontiguousarray(np.stack(arrays))
    else:
        ewm = np.zeros((1, max(ga.n_arcs, 1)), dtype=ga.dtype)
    chz = chc = chmap = None
    if chans:
        zs, cs, keys = [], [], {}
        chmap = np.zeros((k, len(chans)), dtype=np.int8)
        for x, b in chans:
            vx = wts.vw.get(x)
            ea = wts.get_ew(root, x)
            eb = wts.get_ew(x, b)
            if vx is None and ea is None and eb is None:
                j = keys.setdefault("plain", len(zs))
                if j == len(zs):
                    zs.append(ga.ones_e())
                    cs.append(ga.ones_e())
            else:
                j = len(zs)
                z = ga.ones_e() if vx is None else vx[ga.indices]
                zs.append(z if ea is None else z * ea)
                cs.append(ga.ones_e() if eb is None else eb)
            chmap[pos[b], j] += 1
        chmap = np.ascontiguousarray(chmap[:, : len(zs)])
        chz = np.ascontiguousarray(np.stack(zs))
        chc = np.ascontiguousarray(np.stack(cs))
    force = ga.dtype == object
    return kernels.core_hom(
        ga.indptr, ga.indices, roots, nbr, vwm, ewm, eidx, chz, chc, chmap, workers=workers, force_python=force
    )


def hom_counts(ga: GraphArrays, plan: HomPlan, roots: np.ndarray, workers: int = 1) -> np.ndarray:
    """Rooted homomorphism counts ``hom_F(v)`` for ``v`` in ``roots``."""
    roots = np.asarray(roots, dtype=np.int64)
    s = len(plan.adj)
    return _hom(ga, plan.adj, (1 << s) - 1, plan.root, _Weights(ga), roots, workers)
