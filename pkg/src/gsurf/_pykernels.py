"""Pure-Python kernels; the fallback when the compiled extension is missing.

These functions are the semantic reference for ``_ckernels.pyx``.  They
accept object arrays, so they also serve the arbitrary-precision path.
"""

from __future__ import annotations

from bisect import bisect_left

import numpy as np


def pair_index(i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return j * (j - 1) // 2 + i


def _refine(n, adj, cells):
    while True:
        masks = []
        for cell in cells:
            mk = 0
            for v in cell:
                mk |= 1 << v
            masks.append(mk)
        new = []
        for cell in cells:
            if len(cell) == 1:
                new.append(cell)
                continue
            sig = {v: tuple(bin(adj[v] & mk).count("1") for mk in masks) for v in cell}
            groups: dict = {}
            for v in cell:
                groups.setdefault(sig[v], []).append(v)
            for key in sorted(groups):
                new.append(groups[key])
        if len(new) == len(cells):
            return new
        cells = new


def canonical_form(n, adj):
    """Canonical labeling by individualization-refinement without pruning.

    Returns ``(bits, pos, aut, orbit_min)``: the minimum relabelled edge
    bitset over all search-tree leaves, the vertex -> position map of the
    first minimal leaf, the automorphism group order (number of minimal
    leaves) and, for each vertex, the smallest vertex of its orbit.
    """
    adj = [int(a) for a in adj]
    if n == 0:
        return 0, (), 1, ()
    best = [None, None, 0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def leaf(cells):
        pos = [0] * n
        for k, cell in enumerate(cells):
            pos[cell[0]] = k
        bits = 0
        for u in range(n):
            a = adj[u]
            while a:
                low = a & -a
                w = low.bit_length() - 1
                a ^= low
                if u < w:
                    bits |= 1 << pair_index(pos[u], pos[w])
        if best[0] is None or bits < best[0]:
            best[0], best[1], best[2] = bits, pos, 1
            for x in range(n):
                parent[x] = x
        elif bits == best[0]:
            best[2] += 1
            inv = [0] * n
            for v, p in enumerate(best[1]):
                inv[p] = v
            for v in range(n):
                a, b = find(v), find(inv[pos[v]])
                if a != b:
                    parent[max(a, b)] = min(a, b)

    def search(cells):
        cells = _refine(n, adj, cells)
        if len(cells) == n:
            leaf(cells)
            return
        ci = next(i for i, c in enumerate(cells) if len(c) > 1)
        target = cells[ci]
        for v in target:
            rest = [u for u in target if u != v]
            search(cells[:ci] + [[v], rest] + cells[ci + 1 :])

    search([list(range(n))])
    orbit_min = tuple(find(v) for v in range(n))
    return best[0], tuple(best[1]), best[2], orbit_min


def edge_triangle_sums(indptr, indices, wx, ea, eb):
    """For every arc ``p = a->b`` return ``sum_c wx[c] * ea[a->c] * eb[b->c]``
    over common neighbors ``c`` of ``a`` and ``b``."""
    n = len(indptr) - 1
    out = np.zeros(len(indices), dtype=np.result_type(wx, ea, eb))
    ip = indptr.tolist()
    ix = indices.tolist()
    for a in range(n):
        for p in range(ip[a], ip[a + 1]):
            b = ix[p]
            i, iend = ip[a], ip[a + 1]
            j, jend = ip[b], ip[b + 1]
            acc = 0
            while i < iend and j < jend:
                ci, cj = ix[i], ix[j]
                if ci == cj:
                    acc += wx[ci] * ea[i] * eb[j]
                    i += 1
                    j += 1
                elif ci < cj:
                    i += 1
                else:
                    j += 1
            out[p] = acc
    return out


def core_hom(indptr, indices, roots, nbr, vw, ew, eidx, chz=None, chc=None, chmap=None):
    """Weighted rooted homomorphism counts of a small pattern.

    Pattern vertex 0 is pinned to each root in turn; vertex ``t`` is mapped
    into the common neighborhood of its already-mapped pattern neighbors
    ``u < t`` (``nbr[t][u] == 1``), scanning the shortest of their lists.
    A map contributes the product of the vertex weights ``vw[t][image]`` and
    arc weights ``ew[eidx[t][u]][p]``, ``p`` being the CSR position of
    ``image(u) -> image(t)``.

    Channels carry two-hop sums from the root: for root ``v``,
    ``acc[j][c] = sum over z in N(v) & N(c) of chz[j][v->z] * chc[j][z->c]``
    and vertex ``t`` is further weighted by ``prod_j acc[j][image]^chmap[t][j]``.
    A vertex without earlier neighbors ranges over the support of ``acc``.
    """
    k = len(nbr)
    q = 0 if chz is None else len(chz)
    ip = indptr.tolist()
    ix = indices.tolist()
    earlier = [[u for u in range(t) if nbr[t][u]] for t in range(k)]
    chans = [[(j, int(chmap[t][j])) for j in range(q) if chmap[t][j]] for t in range(k)] if q else [[]] * k
    out = np.zeros(len(roots), dtype=vw.dtype)
    img = [0] * k
    acc = [dict() for _ in range(q)]
    touched: list = []

    def rec(t, w_in):
        if t == k:
            return w_in
        us = earlier[t]
        if us:
            u0 = min(us, key=lambda u: ip[img[u] + 1] - ip[img[u]])
            a0 = img[u0]
            cands = [(p, ix[p]) for p in range(ip[a0], ip[a0 + 1])]
        else:
            u0 = None
            cands = [(None, c) for c in touched]
        total = 0
        for p, c in cands:
            w = w_in * vw[t][c]
            if not w:
                continue
            if u0 is not None:
                e = eidx[t][u0]
                if e >= 0:
                    w = w * ew[e][p]
            for u in us:
                if u == u0:
                    continue
                a = img[u]
                qq = bisect_left(ix, c, ip[a], ip[a + 1])
                if qq == ip[a + 1] or ix[qq] != c:
                    w = 0
                    break
                e = eidx[t][u]
                if e >= 0:
                    w = w * ew[e][qq]
            if not w:
                continue
            for j, r in chans[t]:
                w = w * acc[j].get(c, 0) ** r
            if not w:
                continue
            img[t] = c
            total += rec(t + 1, w)
        return total

    for r, v in enumerate(roots):
        v = int(v)
        img[0] = v
        w0 = vw[0][v]
        if not w0:
            out[r] = 0
            continue
        if q:
            seen = {}
            for j in range(q):
                d = acc[j]
                d.clear()
                for p in range(ip[v], ip[v + 1]):
                    base = chz[j][p]
                    if not base:
                        continue
                    z = ix[p]
                    for pp in range(ip[z], ip[z + 1]):
                        c = ix[pp]
                        d[c] = d.get(c, 0) + base * chc[j][pp]
                        seen[c] = None
            touched[:] = list(seen)
        out[r] = rec(1, w0)
    return out


def clique_counts(indptr, indices, roots, s):
    """Number of ``s``-cliques containing each root."""
    ip = indptr.tolist()
    ix = indices.tolist()
    out = np.zeros(len(roots), dtype=np.int64)

    def count(cand, depth):
        if depth == 0:
            return 1
        if len(cand) < depth:
            return 0
        total = 0
        for i, u in enumerate(cand):
            if len(cand) - i < depth:
                break
            nu = set(ix[ip[u] : ip[u + 1]])
            total += count([w for w in cand[i + 1 :] if w in nu], depth - 1)
        return total

    for r, v in enumerate(roots):
        v = int(v)
        if s == 1:
            out[r] = 1
        else:
            out[r] = count(ix[ip[v] : ip[v + 1]], s - 1)
    return out
