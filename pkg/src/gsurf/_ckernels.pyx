# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.  Semantics mirror ``_pykernels`` exactly (int64 only)."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport malloc, free

cnp.import_array()

DEF MAXN = 10


# ---------------------------------------------------------------- canonical form

cdef inline int _popcount(unsigned int x) noexcept nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


cdef inline int _pair(int i, int j) noexcept nogil:
    if i > j:
        i, j = j, i
    return j * (j - 1) // 2 + i


cdef struct _Canon:
    int n
    unsigned int adj[MAXN]
    int have_best
    uint64_t best
    int best_pos[MAXN]
    int64_t count
    int parent[MAXN]


cdef int _find(_Canon *st, int x) noexcept nogil:
    while st.parent[x] != x:
        st.parent[x] = st.parent[st.parent[x]]
        x = st.parent[x]
    return x


cdef int _sig_less(int *a, int *b, int m) noexcept nogil:
    cdef int i
    for i in range(m):
        if a[i] != b[i]:
            return -1 if a[i] < b[i] else 1
    return 0


cdef int _refine(_Canon *st, int *lab, int *cstart, int ncells) noexcept nogil:
    """Equitable refinement in place; returns the new cell count."""
    cdef int n = st.n
    cdef unsigned int masks[MAXN]
    cdef int sig[MAXN][MAXN]
    cdef int newstart[MAXN + 1]
    cdef int i, j, c, v, lo, hi, nnew, key, tmp
    while True:
        for c in range(ncells):
            masks[c] = 0
            for i in range(cstart[c], cstart[c + 1]):
                masks[c] |= 1u << lab[i]
        for i in range(n):
            v = lab[i]
            for c in range(ncells):
                sig[v][c] = _popcount(st.adj[v] & masks[c])
        nnew = 0
        for c in range(ncells):
            lo = cstart[c]
            hi = cstart[c + 1]
            # insertion sort of the cell by signature
            for i in range(lo + 1, hi):
                key = lab[i]
                j = i - 1
                while j >= lo and _sig_less(sig[key], sig[lab[j]], ncells) < 0:
                    lab[j + 1] = lab[j]
                    j -= 1
                lab[j + 1] = key
            newstart[nnew] = lo
            nnew += 1
            for i in range(lo + 1, hi):
                if _sig_less(sig[lab[i - 1]], sig[lab[i]], ncells) != 0:
                    newstart[nnew] = i
                    nnew += 1
        newstart[nnew] = n
        if nnew == ncells:
            return ncells
        for c in range(nnew + 1):
            cstart[c] = newstart[c]
        ncells = nnew


cdef void _leaf(_Canon *st, int *lab) noexcept nogil:
    cdef int n = st.n
    cdef int pos[MAXN]
    cdef int inv[MAXN]
    cdef int u, w, a, b
    cdef uint64_t bits = 0
    for u in range(n):
        pos[lab[u]] = u
    for u in range(n):
        for w in range(u + 1, n):
            if st.adj[u] & (1u << w):
                bits |= (<uint64_t>1) << _pair(pos[u], pos[w])
    if not st.have_best or bits < st.best:
        st.have_best = 1
        st.best = bits
        st.count = 1
        for u in range(n):
            st.best_pos[u] = pos[u]
            st.parent[u] = u
    elif bits == st.best:
        st.count += 1
        for u in range(n):
            inv[st.best_pos[u]] = u
        for u in range(n):
            a = _find(st, u)
            b = _find(st, inv[pos[u]])
            if a != b:
                if a < b:
                    st.parent[b] = a
                else:
                    st.parent[a] = b


cdef void _search(_Canon *st, int *lab_in, int *cstart_in, int ncells) noexcept nogil:
    cdef int n = st.n
    cdef int lab[MAXN]
    cdef int cstart[MAXN + 1]
    cdef int lab2[MAXN]
    cdef int cs2[MAXN + 1]
    cdef int i, c, ci, lo, hi, k, v, nc2
    for i in range(n):
        lab[i] = lab_in[i]
    for i in range(ncells + 1):
        cstart[i] = cstart_in[i]
    ncells = _refine(st, lab, cstart, ncells)
    if ncells == n:
        _leaf(st, lab)
        return
    ci = 0
    while cstart[ci + 1] - cstart[ci] == 1:
        ci += 1
    lo = cstart[ci]
    hi = cstart[ci + 1]
    for k in range(lo, hi):
        v = lab[k]
        # individualize v: [v] then the rest of the cell, original order kept
        for i in range(lo):
            lab2[i] = lab[i]
        lab2[lo] = v
        i = lo + 1
        for c in range(lo, hi):
            if lab[c] != v:
                lab2[i] = lab[c]
                i += 1
        for i in range(hi, n):
            lab2[i] = lab[i]
        nc2 = 0
        for c in range(ci + 1):
            cs2[nc2] = cstart[c]
            nc2 += 1
        cs2[nc2] = lo + 1
        nc2 += 1
        for c in range(ci + 1, ncells + 1):
            cs2[nc2] = cstart[c]
            nc2 += 1
        _search(st, lab2, cs2, ncells + 1)


def canonical_form(int n, adj):
    cdef _Canon st
    cdef int lab[MAXN]
    cdef int cstart[MAXN + 1]
    cdef int i
    if n == 0:
        return 0, (), 1, ()
    if n > MAXN:
        raise ValueError(f"compiled canonical_form supports n <= {MAXN}")
    st.n = n
    st.have_best = 0
    st.count = 0
    for i in range(n):
        st.adj[i] = <unsigned int>adj[i]
        st.parent[i] = i
        lab[i] = i
    cstart[0] = 0
    cstart[1] = n
    with nogil:
        _search(&st, lab, cstart, 1)
    orbit_min = tuple(_find(&st, i) for i in range(n))
    return int(st.best), tuple(st.best_pos[i] for i in range(n)), int(st.count), orbit_min


# ---------------------------------------------------------------- graph kernels

def edge_triangle_sums(const int64_t[::1] indptr, const int64_t[::1] indices,
                       const int64_t[::1] wx, const int64_t[::1] ea,
                       const int64_t[::1] eb):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[int64_t, ndim=1] out_arr = np.zeros(indices.shape[0], dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t a, b, p, i, iend, j, jend
    cdef int64_t acc, ci, cj
    with nogil:
        for a in range(n):
            for p in range(indptr[a], indptr[a + 1]):
                b = indices[p]
                i = indptr[a]
                iend = indptr[a + 1]
                j = indptr[b]
                jend = indptr[b + 1]
                acc = 0
                while i < iend and j < jend:
                    ci = indices[i]
                    cj = indices[j]
                    if ci == cj:
                        acc += wx[ci] * ea[i] * eb[j]
                        i += 1
                        j += 1
                    elif ci < cj:
                        i += 1
                    else:
                        j += 1
                out[p] = acc
    return out_arr


cdef inline Py_ssize_t _bsearch(const int64_t[::1] ix, Py_ssize_t lo, Py_ssize_t hi,
                                int64_t c) noexcept nogil:
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if ix[mid] < c:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef struct _CoreCtx:
    int k
    int q
    int64_t *img
    int64_t *acc      # q x n two-hop sums for the current root
    int64_t *touched
    Py_ssize_t ntouched
    Py_ssize_t n


cdef int64_t _chan_weight(_CoreCtx *cx, const signed char[:, ::1] chmap, int t, int64_t c) noexcept nogil:
    cdef int j, r
    cdef int64_t w = 1, a
    for j in range(cx.q):
        r = chmap[t, j]
        if r:
            a = cx.acc[j * cx.n + c]
            while r:
                w = w * a
                r -= 1
    return w


cdef int64_t _core_rec(_CoreCtx *cx, int t, int64_t acc,
                       const int64_t[::1] indptr, const int64_t[::1] indices,
                       const signed char[:, ::1] nbr, const int64_t[:, ::1] vw,
                       const int64_t[:, ::1] ew, const int[:, ::1] eidx,
                       const signed char[:, ::1] chmap) noexcept nogil:
    cdef int u, u0 = -1, e
    cdef Py_ssize_t p, q, end, d, dmin = -1, lo, hi
    cdef int64_t c, w, total = 0, a
    cdef int64_t *img = cx.img
    if t == cx.k:
        return acc
    # walk the neighbor list of the mapped neighbor with the smallest degree
    for u in range(t):
        if nbr[t, u]:
            d = indptr[img[u] + 1] - indptr[img[u]]
            if dmin < 0 or d < dmin:
                dmin = d
                u0 = u
    if u0 >= 0:
        lo = indptr[img[u0]]
        hi = indptr[img[u0] + 1]
    else:
        lo = 0
        hi = cx.ntouched
    for p in range(lo, hi):
        c = indices[p] if u0 >= 0 else cx.touched[p]
        w = acc * vw[t, c]
        if w == 0:
            continue
        if u0 >= 0:
            e = eidx[t, u0]
            if e >= 0:
                w = w * ew[e, p]
        for u in range(t):
            if u == u0 or not nbr[t, u] or w == 0:
                continue
            a = img[u]
            end = indptr[a + 1]
            q = _bsearch(indices, indptr[a], end, c)
            if q == end or indices[q] != c:
                w = 0
                break
            e = eidx[t, u]
            if e >= 0:
                w = w * ew[e, q]
        if w == 0:
            continue
        if cx.q:
            w = w * _chan_weight(cx, chmap, t, c)
            if w == 0:
                continue
        img[t] = c
        total += _core_rec(cx, t + 1, w, indptr, indices, nbr, vw, ew, eidx, chmap)
    return total


def core_hom(const int64_t[::1] indptr, const int64_t[::1] indices,
             const int64_t[::1] roots, const signed char[:, ::1] nbr,
             const int64_t[:, ::1] vw, const int64_t[:, ::1] ew,
             const int[:, ::1] eidx, const int64_t[:, ::1] chz=None,
             const int64_t[:, ::1] chc=None, const signed char[:, ::1] chmap=None):
    cdef int k = nbr.shape[0]
    cdef int q = 0 if chz is None else chz.shape[0]
    cdef Py_ssize_t r, nr = roots.shape[0], n = indptr.shape[0] - 1
    cdef cnp.ndarray[int64_t, ndim=1] out_arr = np.zeros(nr, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef int64_t img[16]
    cdef int64_t v, w0, base, c
    cdef Py_ssize_t p, pp, i, j
    cdef _CoreCtx cx
    cdef unsigned char *mark = NULL
    cdef const signed char[:, ::1] cm
    if k > 16:
        raise ValueError("pattern too large")
    if chmap is None:
        cm = np.zeros((k, 1), dtype=np.int8)
    else:
        cm = chmap
    cx.k = k
    cx.q = q
    cx.img = img
    cx.n = n
    cx.acc = NULL
    cx.touched = NULL
    cx.ntouched = 0
    if q:
        cx.acc = <int64_t *>malloc(sizeof(int64_t) * q * n + 1)
        cx.touched = <int64_t *>malloc(sizeof(int64_t) * n + 1)
        mark = <unsigned char *>malloc(n + 1)
        if cx.acc == NULL or cx.touched == NULL or mark == NULL:
            free(cx.acc)
            free(cx.touched)
            free(mark)
            raise MemoryError()
        for i in range(q * n):
            cx.acc[i] = 0
        for i in range(n):
            mark[i] = 0
    try:
        with nogil:
            for r in range(nr):
                v = roots[r]
                img[0] = v
                w0 = vw[0, v]
                if w0 == 0:
                    out[r] = 0
                    continue
                if q:
                    # two-hop sums: acc[j][c] = sum over z in N(v) & N(c) of chz[j][v->z] * chc[j][z->c]
                    cx.ntouched = 0
                    for j in range(q):
                        for p in range(indptr[v], indptr[v + 1]):
                            base = chz[j, p]
                            if base == 0:
                                continue
                            for pp in range(indptr[indices[p]], indptr[indices[p] + 1]):
                                c = indices[pp]
                                cx.acc[j * n + c] += base * chc[j, pp]
                                if not mark[c]:
                                    mark[c] = 1
                                    cx.touched[cx.ntouched] = c
                                    cx.ntouched += 1
                out[r] = _core_rec(&cx, 1, w0, indptr, indices, nbr, vw, ew, eidx, cm)
                if q:
                    for i in range(cx.ntouched):
                        c = cx.touched[i]
                        mark[c] = 0
                        for j in range(q):
                            cx.acc[j * n + c] = 0
    finally:
        free(cx.acc)
        free(cx.touched)
        free(mark)
    return out_arr


cdef int64_t _count_cliques(int64_t *cand, Py_ssize_t ncand, int depth,
                            const int64_t[::1] indptr, const int64_t[::1] indices,
                            int64_t *buf) noexcept nogil:
    """Cliques of size ``depth`` inside the sorted candidate list."""
    cdef Py_ssize_t i, j, jend, a, nn
    cdef int64_t u, total = 0
    cdef int64_t *nxt = buf
    if depth == 0:
        return 1
    if depth == 1:
        return ncand
    for i in range(ncand - depth + 1):
        u = cand[i]
        # cand[i+1:] intersected with N(u)
        a = i + 1
        j = indptr[u]
        jend = indptr[u + 1]
        nn = 0
        while a < ncand and j < jend:
            if cand[a] == indices[j]:
                nxt[nn] = cand[a]
                nn += 1
                a += 1
                j += 1
            elif cand[a] < indices[j]:
                a += 1
            else:
                j += 1
        if nn >= depth - 1:
            total += _count_cliques(nxt, nn, depth - 1, indptr, indices, buf + nn)
    return total


def clique_counts(const int64_t[::1] indptr, const int64_t[::1] indices,
                  const int64_t[::1] roots, int s):
    cdef Py_ssize_t r, nr = roots.shape[0], d, i, maxdeg = 0
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[int64_t, ndim=1] out_arr = np.zeros(nr, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef int64_t v
    cdef int64_t *buf
    for i in range(n):
        if indptr[i + 1] - indptr[i] > maxdeg:
            maxdeg = indptr[i + 1] - indptr[i]
    buf = <int64_t *>malloc(sizeof(int64_t) * (maxdeg * (s + 1) + 1))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for r in range(nr):
                v = roots[r]
                if s == 1:
                    out[r] = 1
                    continue
                d = indptr[v + 1] - indptr[v]
                for i in range(d):
                    buf[i] = indices[indptr[v] + i]
                out[r] = _count_cliques(buf, d, s - 1, indptr, indices, buf + d)
    finally:
        free(buf)
    return out_arr
