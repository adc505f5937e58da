"""Exact integer frequency matrices between graphlets.

``U_s(i, j)`` is the number of (not necessarily induced) copies of ``H_i``
inside ``H_j``; in orbit mode only copies that place the designated node of
``H_j`` in the designated orbit of ``H_i`` count.  ``W`` holds the same
counts restricted to induced copies.  In hatted mode the inter-family
blocks are whole-graph counts, so ``W~ = diag(U^-1) U~`` holds there too.

Matrices are built by classifying every connected node subset (net) and
every connected spanning edge subset (gross) of each host graphlet.  The
embedding-enumeration functions ``pairwise_gross``/``pairwise_net`` are an
independent route kept for cross-checks.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .atlas import Atlas, GraphletId, build_atlas
from .smallgraph import adj_from_bits, induced_bits, is_connected, mask_connected

log = logging.getLogger(__name__)

MATRIX_FORMAT = "gsurf-matrix v1"
MODES = ("orbit", "hatted")


class ConversionError(RuntimeError):
    """An exact identity failed; points at an atlas or ordering bug."""


# ---------------------------------------------------------------- containers


@dataclass
class IntMatrix:
    """Dense exact integer matrix with SEIRA-ordered row/column labels."""

    rows: list[GraphletId]
    cols: list[GraphletId]
    data: np.ndarray
    kind: str = "U"
    mode: str = "orbit"

    def __post_init__(self):
        self.rows = [GraphletId(*g) for g in self.rows]
        self.cols = [GraphletId(*g) for g in self.cols]
        if self.data.shape != (len(self.rows), len(self.cols)):
            raise ValueError("shape does not match labels")
        self._ri = {g: i for i, g in enumerate(self.rows)}
        self._ci = {g: i for i, g in enumerate(self.cols)}

    @property
    def shape(self):
        return self.data.shape

    def nnz(self) -> int:
        return int(np.count_nonzero(self.data))

    def row_index(self, gid) -> int:
        return self._ri[GraphletId(*gid)]

    def col_index(self, gid) -> int:
        return self._ci[GraphletId(*gid)]

    def entry(self, gi, gj) -> int:
        return int(self.data[self.row_index(gi), self.col_index(gj)])

    def block(self, rows, cols) -> "IntMatrix":
        ri = [self.row_index(g) for g in rows]
        ci = [self.col_index(g) for g in cols]
        return IntMatrix(list(rows), list(cols), self.data[np.ix_(ri, ci)], self.kind, self.mode)

    def pattern(self) -> np.ndarray:
        return self.data != 0

    def __eq__(self, other):
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.data, other.data)
        )


@dataclass(frozen=True)
class SignDiagonal:
    """``lambda_i = (-1)^m(H_i)`` over a graphlet order."""

    signs: np.ndarray

    @classmethod
    def for_ids(cls, atlas: Atlas, ids) -> "SignDiagonal":
        return cls(np.array([-1 if atlas.pattern(g[0], g[1]).m % 2 else 1 for g in ids], dtype=np.int64))

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.signs[:, None] * u * self.signs[None, :]


# ---------------------------------------------------------------- exact helpers


def _fits_int64(a: np.ndarray, b: np.ndarray) -> bool:
    if a.size == 0 or b.size == 0:
        return True
    ma = int(np.abs(a).max())
    mb = int(np.abs(b).max())
    return ma * mb * max(a.shape[-1], 1) < 2**62


def exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer product; int64 when provably safe, Python ints otherwise."""
    if a.dtype != object and b.dtype != object and _fits_int64(a, b):
        return a.astype(np.int64) @ b.astype(np.int64)
    return np.array(a, dtype=object) @ np.array(b, dtype=object)


def exact_det(rows) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    m = [[int(x) for x in r] for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def exact_solve(a, b) -> list[Fraction]:
    """Solve the square system ``a x = b`` over the rationals."""
    n = len(a)
    m = [[Fraction(int(x)) for x in row] + [Fraction(int(y))] for row, y in zip(a, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ConversionError("singular system")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[r][n] for r in range(n)]


# ---------------------------------------------------------------- host profiles


def _host_profile(atlas: Atlas, s: int, bits: int, orbit_of=None, roots=None):
    """Classify all connected node subsets and spanning edge subsets of a host.

    Returns ``(net, gross)``.  With ``roots`` (map host node -> column key)
    each is ``{key: {gid: count}}`` counting only subsets containing that
    node, keyed by the node's orbit in the subgraph.  Without ``roots`` each
    is ``{gid: count}`` of whole-graph pattern counts (``sigma = 0``).
    """
    adj = adj_from_bits(s, bits)
    glob = roots is None
    if glob:
        net: dict = {}
        gross: dict = {}
    else:
        net = {key: {} for key in roots.values()}
        gross = {key: {} for key in roots.values()}

    def add(table, k, p, orbits, nodes):
        if glob:
            g = (k, p, 0)
            table[g] = table.get(g, 0) + 1
            return
        for v, o in zip(nodes, orbits):
            key = roots.get(v)
            if key is not None:
                d = table[key]
                g = (k, p, o)
                d[g] = d.get(g, 0) + 1

    for mask in range(1, 1 << s):
        if not mask_connected(adj, mask):
            continue
        nodes = [v for v in range(s) if mask >> v & 1]
        if not glob and not any(v in roots for v in nodes):
            continue
        k = len(nodes)
        ib = induced_bits(adj, nodes)
        p, orbits = atlas.classify(k, ib)
        add(net, k, p, orbits, nodes)
        # every connected spanning edge subset of the induced subgraph
        sub = ib
        while True:
            if k == 1 or is_connected(k, adj_from_bits(k, sub)):
                p2, orb2 = atlas.classify(k, sub)
                add(gross, k, p2, orb2, nodes)
            if sub == 0:
                break
            sub = (sub - 1) & ib
    return net, gross


@dataclass
class _Profiles:
    ids: list[GraphletId]
    net: dict
    gross: dict


def _profiles(atlas: Atlas, t: int, mode: str, start: int = 1) -> _Profiles:
    ids = atlas.ids(t, mode, start)
    net, gross = {}, {}
    for s in range(start, t + 1):
        for pat in atlas.family(s):
            if mode == "hatted":
                n, g = _host_profile(atlas, s, pat.bits)
                net[pat.gid(0)] = n
                gross[pat.gid(0)] = g
            else:
                roots = {pat.rep(o): o for o in range(1, pat.n_orbits + 1)}
                n, g = _host_profile(atlas, s, pat.bits, roots=roots)
                for o in roots.values():
                    net[pat.gid(o)] = n[o]
                    gross[pat.gid(o)] = g[o]
    return _Profiles(ids, net, gross)


def _assemble(rows, cols, table) -> np.ndarray:
    out = np.zeros((len(rows), len(cols)), dtype=np.int64)
    ri = {tuple(g): i for i, g in enumerate(rows)}
    for j, gj in enumerate(cols):
        for gi, c in table[gj].items():
            i = ri.get(tuple(gi))
            if i is not None:
                out[i, j] = c
    return out


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def build_U(atlas: Atlas, s: int, mode: str = "orbit") -> IntMatrix:
    """Intra-family gross matrix ``U_s`` (orbit) or ``U^_s`` (hatted)."""
    _check_mode(mode)
    prof = _profiles(atlas, s, mode, start=s)
    data = _assemble(prof.ids, prof.ids, prof.gross)
    return IntMatrix(prof.ids, prof.ids, data, "U", mode)


def build_W(atlas: Atlas, t: int, mode: str = "orbit") -> IntMatrix:
    """Direct induced counts over ``L_t`` (the right side of ``W~ = diag(U^-1) U~``)."""
    _check_mode(mode)
    prof = _profiles(atlas, t, mode)
    return IntMatrix(prof.ids, prof.ids, _assemble(prof.ids, prof.ids, prof.net), "W", mode)


def signs(atlas: Atlas, s: int, mode: str = "orbit") -> SignDiagonal:
    return SignDiagonal.for_ids(atlas, atlas.family_ids(s, mode))


def invert_involutory(u: IntMatrix, lam: SignDiagonal) -> IntMatrix:
    """``Lambda U Lambda``, verified to be the exact inverse of ``U``."""
    inv = lam.apply(u.data)
    prod = exact_matmul(inv, u.data)
    if not np.array_equal(prod, np.eye(len(u.rows), dtype=np.int64)):
        raise ConversionError(f"involution check failed for {u.kind} over {len(u.rows)} graphlets")
    return IntMatrix(u.rows, u.cols, inv, "Uinv", u.mode)


def build_inter_family(atlas: Atlas, t: int, mode: str = "orbit") -> tuple[IntMatrix, IntMatrix]:
    """``(U~_t, W~_t)`` over all graphlets of families ``1..t``."""
    _check_mode(mode)
    prof = _profiles(atlas, t, mode)
    ids = prof.ids
    ut = _assemble(ids, ids, prof.gross)
    wt = np.zeros_like(ut)
    off = 0
    for s in range(1, t + 1):
        fam = atlas.family_ids(s, mode)
        sl = slice(off, off + len(fam))
        u = IntMatrix(fam, fam, ut[sl, sl], "U", mode)
        inv = invert_involutory(u, signs(atlas, s, mode))
        wt[sl, :] = exact_matmul(inv.data, ut[sl, :])
        off += len(fam)
    if (wt < 0).any():
        raise ConversionError("negative net count in W~")
    return IntMatrix(ids, ids, ut, "Ut", mode), IntMatrix(ids, ids, wt, "Wt", mode)


def reduced_matrix(u: IntMatrix, i: int, j: int) -> tuple[np.ndarray, bool]:
    """``U`` without row ``i`` and column ``j`` (0-based) and its nonsingularity.

    The flag is ``U(j, i) != 0``; the determinant magnitude equals ``|U(j, i)|``.
    """
    d = np.delete(np.delete(u.data, i, axis=0), j, axis=1)
    return d, bool(u.data[j, i] != 0)


def solve_reduced(u: IntMatrix, gross, unknown: int, zero: int) -> list[int]:
    """Net vector from a gross vector whose entry ``unknown`` is missing,
    given that net entry ``zero`` is known to vanish.  Exact; general but slow."""
    d, ok = reduced_matrix(u, unknown, zero)
    if not ok:
        raise ConversionError("reduced system is singular")
    rhs = [int(x) for k, x in enumerate(gross) if k != unknown]
    x = exact_solve(d.tolist(), rhs)
    out = []
    it = iter(x)
    for k in range(len(u.rows)):
        if k == zero:
            out.append(0)
            continue
        val = next(it)
        if val.denominator != 1:
            raise ConversionError("non-integer solution of reduced system")
        out.append(int(val))
    return out


# ---------------------------------------------------------------- embedding route


def _embed_count(ai, si, aj, sj, induced, x=None, v=None) -> int:
    """Injective (induced, if asked) edge-preserving maps ``H_i -> H_j``,
    optionally with ``x -> v``."""
    start = 0 if x is None else x
    order = [start]
    seen = 1 << start
    while len(order) < si:
        for u in range(si):
            if not seen >> u & 1 and any(ai[u] >> w & 1 for w in order):
                order.append(u)
                seen |= 1 << u
                break
        else:
            raise ValueError("pattern not connected")
    img = [-1] * si
    full = (1 << sj) - 1

    def ok(u, c):
        for w in order:
            if img[w] < 0:
                break
            e = ai[u] >> w & 1
            f = aj[c] >> img[w] & 1
            if e and not f:
                return False
            if induced and f and not e:
                return False
        return True

    def rec(t, used):
        if t == si:
            return 1
        u = order[t]
        total = 0
        cand = full & ~used
        while cand:
            low = cand & -cand
            c = low.bit_length() - 1
            cand ^= low
            if ok(u, c):
                img[u] = c
                total += rec(t + 1, used | low)
                img[u] = -1
        return total

    if x is None:
        return rec(0, 0)
    img[x] = v
    return rec(1, 1 << v)


def _pairwise(atlas: Atlas, gi, gj, induced: bool) -> int:
    gi, gj = GraphletId(*gi), GraphletId(*gj)
    pi, pj = atlas.pattern(gi.s, gi.p), atlas.pattern(gj.s, gj.p)
    if gi.s > gj.s:
        return 0
    if (gi.sigma == 0) != (gj.sigma == 0):
        raise ValueError("mixing hatted and orbit graphlets")
    if gi.sigma == 0:
        n = _embed_count(pi.adj, pi.s, pj.adj, pj.s, induced)
        return n // pi.aut
    v = pj.rep(gj.sigma)
    members = pi.members(gi.sigma)
    n = _embed_count(pi.adj, pi.s, pj.adj, pj.s, induced, members[0], v)
    total = n * len(members)
    if total % pi.aut:
        raise ConversionError("embedding count not divisible by automorphism order")
    return total // pi.aut


def pairwise_gross(atlas: Atlas, gi, gj) -> int:
    """Copies of ``gi`` in ``gj`` by embedding enumeration (independent route)."""
    return _pairwise(atlas, gi, gj, induced=False)


def pairwise_net(atlas: Atlas, gi, gj) -> int:
    """Induced copies of ``gi`` in ``gj`` by embedding enumeration."""
    return _pairwise(atlas, gi, gj, induced=True)


# ---------------------------------------------------------------- serialization


def save_matrix(m: IntMatrix, path, atlas_hash: str, **meta) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(f"# {MATRIX_FORMAT}\n")
        fh.write(f"# atlas {atlas_hash}\n")
        fh.write(f"# kind {m.kind}\n# mode {m.mode}\n")
        for k, v in meta.items():
            fh.write(f"# {k} {v}\n")
        fh.write(f"# shape {m.shape[0]} {m.shape[1]}\n")
        fh.write("# rows " + " ".join(f"{g.s},{g.p},{g.sigma}" for g in m.rows) + "\n")
        fh.write("# cols " + " ".join(f"{g.s},{g.p},{g.sigma}" for g in m.cols) + "\n")
        fh.write("# entries: i j value (1-based)\n")
        ii, jj = np.nonzero(m.data)
        for i, j in zip(ii.tolist(), jj.tolist()):
            fh.write(f"{i + 1} {j + 1} {int(m.data[i, j])}\n")
    os.replace(tmp, path)


def load_matrix(path, atlas_hash: str | None = None) -> IntMatrix:
    head: dict[str, str] = {}
    trip = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition(" ")
                head[key] = val
                continue
            try:
                i, j, v = (int(x) for x in line.split())
            except ValueError as exc:
                raise ConversionError(f"{path}:{lineno}: malformed triplet") from exc
            trip.append((i, j, v))
    if head.get(MATRIX_FORMAT.split()[0]) != MATRIX_FORMAT.split()[1]:
        raise ConversionError(f"{path}: not a {MATRIX_FORMAT} file")
    if atlas_hash is not None and head.get("atlas") != atlas_hash:
        raise ConversionError(f"{path}: built for atlas {head.get('atlas')}, expected {atlas_hash}")

    def ids(s):
        return [GraphletId(*(int(x) for x in tok.split(","))) for tok in s.split()]

    rows, cols = ids(head.get("rows", "")), ids(head.get("cols", ""))
    data = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, j, v in trip:
        if not (1 <= i <= len(rows) and 1 <= j <= len(cols)):
            raise ConversionError(f"{path}: entry ({i},{j}) out of range")
        data[i - 1, j - 1] = v
    return IntMatrix(rows, cols, data, head.get("kind", "U"), head.get("mode", "orbit"))


# ---------------------------------------------------------------- bundle


def default_cache_dir() -> Path:
    return Path(os.environ.get("GSURF_CACHE", Path.home() / ".cache" / "gsurf"))


@dataclass
class MatrixBundle:
    """Everything the engine needs for families ``1..t`` in one mode."""

    atlas: Atlas
    t: int
    mode: str
    U: dict[int, IntMatrix]
    Uinv: dict[int, IntMatrix] = field(default_factory=dict)
    Ut: IntMatrix | None = None
    Wt: IntMatrix | None = None

    def __post_init__(self):
        for s, u in self.U.items():
            if s not in self.Uinv:
                self.Uinv[s] = invert_involutory(u, signs(self.atlas, s, self.mode))

    def W_block(self, r: int, s: int) -> IntMatrix:
        return self.Wt.block(self.atlas.family_ids(r, self.mode), self.atlas.family_ids(s, self.mode))

    def W_prec(self, s: int) -> IntMatrix:
        """Rows: all graphlets of families ``< s``; columns: family ``s``."""
        return self.Wt.block(self.atlas.ids(s - 1, self.mode), self.atlas.family_ids(s, self.mode))

    @classmethod
    def build(cls, atlas: Atlas, t: int, mode: str = "orbit") -> "MatrixBundle":
        ut, wt = build_inter_family(atlas, t, mode)
        U = {s: ut.block(atlas.family_ids(s, mode), atlas.family_ids(s, mode)) for s in range(1, t + 1)}
        return cls(atlas, t, mode, U, Ut=ut, Wt=wt)

    def files(self, directory) -> dict[str, Path]:
        d = Path(directory)
        out = {f"U_{s}": d / f"U_{s}_{self.mode}.txt" for s in range(1, self.t + 1)}
        out["Ut"] = d / f"Ut_{self.t}_{self.mode}.txt"
        out["Wt"] = d / f"Wt_{self.t}_{self.mode}.txt"
        return out

    def save(self, directory) -> list[Path]:
        h = self.atlas.hash
        files = self.files(directory)
        for s in range(1, self.t + 1):
            save_matrix(self.U[s], files[f"U_{s}"], h, s=s)
        save_matrix(self.Ut, files["Ut"], h, t=self.t)
        save_matrix(self.Wt, files["Wt"], h, t=self.t)
        return list(files.values())

    @classmethod
    def load(cls, atlas: Atlas, t: int, mode: str, directory) -> "MatrixBundle":
        """Load and re-verify; raises ``ConversionError`` on any inconsistency."""
        h = atlas.hash
        b = cls.__new__(cls)
        b.atlas, b.t, b.mode = atlas, t, mode
        files = b.files(directory)
        U = {s: load_matrix(files[f"U_{s}"], h) for s in range(1, t + 1)}
        ut = load_matrix(files["Ut"], h)
        wt = load_matrix(files["Wt"], h)
        for s, u in U.items():
            fam = atlas.family_ids(s, mode)
            if u.rows != fam or u.cols != fam:
                raise ConversionError(f"U_{s}: graphlet order does not match the atlas")
            if not np.array_equal(ut.block(fam, fam).data, u.data):
                raise ConversionError(f"U_{s} disagrees with the diagonal block of U~")
        bundle = cls(atlas, t, mode, U, Ut=ut, Wt=wt)
        off = 0
        for s in range(1, t + 1):
            n = len(U[s].rows)
            if not np.array_equal(exact_matmul(bundle.Uinv[s].data, ut.data[off : off + n]), wt.data[off : off + n]):
                raise ConversionError(f"W~ rows of family {s} disagree with U~")
            off += n
        return bundle


def get_bundle(t: int, mode: str = "orbit", cache_dir=None, atlas: Atlas | None = None) -> MatrixBundle:
    """Load matrices from the cache (keyed by atlas hash), building if missing."""
    atlas = atlas or build_atlas(t)
    root = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    d = root / atlas.hash
    try:
        return MatrixBundle.load(atlas, t, mode, d)
    except FileNotFoundError:
        pass
    bundle = MatrixBundle.build(atlas, t, mode)
    try:
        bundle.save(d)
    except OSError as exc:
        log.warning("could not write matrix cache %s: %s", d, exc)
    return bundle
