"""G-SURF: per-vertex net graphlet frequencies through gross counts.

Families are processed in order.  For family ``s`` the engine

1. flags graphlets that must have zero net count at a vertex, using the
   net counts of smaller graphlets (inter-family bound),
2. computes gross counts of all non-clique graphlets,
3. flags more zeros from those gross counts (intra-family bound),
4. converts gross to net.  Vertices with a proven zero skip the clique
   count and solve the reduced system; the rest count cliques and apply
   ``U_s^-1`` directly.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .atlas import Atlas, GraphletId, build_atlas
from .conversion import MatrixBundle, exact_matmul, get_bundle
from .graph import SourceGraph
from .homcount import GraphArrays, family_plans, hom_counts

log = logging.getLogger(__name__)

T_MAX = 5
CATEGORIES = ("zero_by_filter", "reduced", "zero_by_full_system", "full")
RULE_NONE, RULE_INTRA, RULE_INTER = 0, 1, 2


class EngineError(RuntimeError):
    pass


@dataclass
class FrequencyTable:
    """Per-vertex exact counts; one column per graphlet in ``order``."""

    order: list[GraphletId]
    values: np.ndarray
    t: int
    labels: tuple = ()
    kind: str = "net"
    mode: str = "orbit"

    def column(self, gid) -> np.ndarray:
        return self.values[:, self.order.index(GraphletId(*gid))]

    def family(self, s: int) -> np.ndarray:
        cols = [i for i, g in enumerate(self.order) if g.s == s]
        return self.values[:, cols]

    def to_python(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.values]


@dataclass
class FilterMask:
    """Graphlets proven to have zero net count, with the bound that fired."""

    s: int
    zero: np.ndarray  # n x |H_s| bool
    rule: np.ndarray  # n x |H_s| int8: RULE_*
    witness: np.ndarray  # n x |H_s| int: column of the bounding graphlet in L_t
    bound: np.ndarray  # n x |H_s| int: the matrix entry that exceeded the count

    @property
    def vertex_mask(self) -> np.ndarray:
        """``M_s``: vertices with at least one proven zero."""
        return self.zero.any(axis=1)


@dataclass
class RunStats:
    n: int
    families: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"n": self.n, "families": {str(s): v for s, v in self.families.items()}}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def percent(self, s: int, category: str) -> float:
        return self.families[s]["percent"][category]


# ---------------------------------------------------------------- filters


def _first_true(m: np.ndarray):
    """Per row: whether any entry is set and the first such column."""
    return m.any(axis=1), m.argmax(axis=1)


def inter_family_filter(mask: FilterMask, prec: np.ndarray, wprec: np.ndarray, rows=None) -> None:
    """``f(H_i)(v) < W(i, j)  =>  f(H_j)(v) = 0`` for smaller graphlets ``H_i``."""
    for j in range(wprec.shape[1]):
        idx = np.nonzero(wprec[:, j] > 0)[0]
        if len(idx) == 0:
            continue
        hit, first = _first_true(prec[:, idx] < wprec[idx, j])
        _record(mask, j, hit, idx[first], wprec[idx[first], j], RULE_INTER, rows)


def intra_family_filter(mask: FilterMask, gross: np.ndarray, u: np.ndarray, known: np.ndarray, offset: int, rows) -> None:
    """``g(H_i)(v) < U(i, j)  =>  f(H_j)(v) = 0`` for computed gross entries ``i``.

    ``i = j`` gives the reflexive case: zero gross forces zero net.
    """
    for j in range(u.shape[1]):
        idx = np.nonzero((u[:, j] > 0) & known)[0]
        if len(idx) == 0:
            continue
        hit, first = _first_true(gross[:, idx] < u[idx, j])
        _record(mask, j, hit, offset + idx[first], u[idx[first], j], RULE_INTRA, rows)


def _record(mask, j, hit, wit, bound, rule, rows):
    if rows is None:
        rows = np.arange(mask.zero.shape[0])
    new = hit & ~mask.zero[rows, j]
    r = rows[new]
    mask.zero[r, j] = True
    mask.rule[r, j] = rule
    mask.witness[r, j] = wit[new] if np.ndim(wit) else wit
    mask.bound[r, j] = bound[new] if np.ndim(bound) else bound


def apply_filters(s: int, prec: np.ndarray, bundle: MatrixBundle, gross=None, rows=None) -> FilterMask:
    """Sound zero mask for family ``s`` from precedent nets (and gross, if given)."""
    nf = len(bundle.U[s].rows)
    n = prec.shape[0]
    mask = FilterMask(
        s,
        np.zeros((n, nf), dtype=bool),
        np.zeros((n, nf), dtype=np.int8),
        np.full((n, nf), -1, dtype=np.int64),
        np.zeros((n, nf), dtype=np.int64),
    )
    inter_family_filter(mask, prec, bundle.W_prec(s).data)
    if gross is not None:
        rows = np.arange(n) if rows is None else rows
        known = np.ones(nf, dtype=bool)
        known[-1] = False
        intra_family_filter(mask, gross, bundle.U[s].data, known, prec.shape[1], rows)
    return mask


# ---------------------------------------------------------------- gross counts


def _count_dtype(g: SourceGraph, t: int):
    d = g.max_degree
    # rooted homomorphism counts of a connected t-node pattern are <= d^(t-1)
    return np.int64 if (d + 1) ** (t - 1) * 64 < kernels.INT64_LIMIT else object


def family_gross(
    ga: GraphArrays, atlas: Atlas, s: int, prec: np.ndarray, roots: np.ndarray, workers: int = 1
) -> np.ndarray:
    """Gross counts of the non-clique graphlets of family ``s`` at ``roots``.

    ``prec`` holds net counts of all smaller graphlets at every vertex.
    """
    plans = family_plans(atlas, s)
    out = np.zeros((len(roots), len(plans)), dtype=ga.dtype)
    if len(roots) == 0:
        return out
    pr = prec[roots]
    for k, plan in enumerate(plans):
        hom = hom_counts(ga, plan, roots, workers)
        corr = exact_matmul(pr, plan.coef.reshape(-1, 1)).reshape(-1)
        inj = hom - corr
        if ga.dtype == object:
            q = np.array([divmod(int(x), plan.stab) for x in inj], dtype=object).reshape(-1, 2)
            rem, out[:, k] = q[:, 1], q[:, 0]
        else:
            out[:, k], rem = np.divmod(inj, plan.stab)
        if (rem != 0).any() or (out[:, k] < 0).any():
            raise EngineError(f"inconsistent gross count for {plan.gid}")
    return out


def clique_gross(ga: GraphArrays, s: int, roots: np.ndarray, workers: int = 1) -> np.ndarray:
    if len(roots) == 0:
        return np.zeros(0, dtype=ga.dtype)
    c = kernels.clique_counts(ga.indptr, ga.indices, roots, s, workers=workers)
    return c.astype(ga.dtype)


def up_rec(s: int, precedents: FrequencyTable, g: SourceGraph, v: int, atlas: Atlas | None = None) -> np.ndarray:
    """Gross vector over family ``s`` at one vertex (clique entry included)."""
    atlas = atlas or build_atlas(max(s, precedents.t))
    ga = GraphArrays(g, _count_dtype(g, s))
    prec = _prec_matrix(precedents, atlas, s, ga.dtype)
    roots = np.array([v], dtype=np.int64)
    nc = family_gross(ga, atlas, s, prec, roots)[0]
    return np.concatenate([nc, clique_gross(ga, s, roots)])


def _prec_matrix(table: FrequencyTable, atlas: Atlas, s: int, dtype) -> np.ndarray:
    ids = atlas.ids(s - 1, "orbit")
    cols = [table.order.index(gid) for gid in ids]
    return np.asarray(table.values[:, cols], dtype=dtype)


# ---------------------------------------------------------------- conversion


def convert(s: int, gross: np.ndarray, bundle: MatrixBundle, zero_col=None) -> np.ndarray:
    """Net vectors (rows) from gross vectors (rows) of family ``s``.

    Without ``zero_col`` this is ``f = U^-1 g``.  With ``zero_col = j`` the
    clique entry of ``gross`` is ignored and recovered from ``f_j = 0``.
    """
    uinv = bundle.Uinv[s].data
    K = uinv.shape[0] - 1
    g = np.array(gross, dtype=gross.dtype, copy=True)
    if g.ndim == 1:
        return convert(s, g.reshape(1, -1), bundle, zero_col)[0]
    if zero_col is None:
        return exact_matmul(g, uinv.T)
    g[:, K] = 0
    f0 = exact_matmul(g, uinv.T)
    if zero_col == K:
        return f0
    piv = int(uinv[zero_col, K])
    if piv == 0:
        raise EngineError(f"reduced system singular for column {zero_col}")
    num = -f0[:, zero_col]
    if ((num % piv) != 0).any():
        raise EngineError("reduced system has no integer solution")
    c = num // piv
    return f0 + c.reshape(-1, 1) * uinv[:, K].reshape(1, -1)


def _zero_priority(u: np.ndarray) -> np.ndarray:
    """Order in which proven zeros are preferred as the reduced pivot."""
    K = u.shape[0] - 1
    nnz = np.count_nonzero(u, axis=0)
    order = sorted(range(u.shape[1]), key=lambda j: (j != K, nnz[j], j))
    return np.array(order, dtype=np.int64)


# ---------------------------------------------------------------- driver


def initial_table(g: SourceGraph, atlas: Atlas, t: int, dtype=np.int64) -> np.ndarray:
    values = np.zeros((g.n, len(atlas.ids(t, "orbit"))), dtype=dtype)
    values[:, 0] = 1
    if t >= 2:
        values[:, 1] = np.diff(g.indptr)
    return values


def run(
    g: SourceGraph,
    t: int,
    filters: bool = True,
    reduced: bool = True,
    workers: int = 1,
    bundle: MatrixBundle | None = None,
    return_masks: bool = False,
):
    """Net orbit frequencies of all graphlets with up to ``t`` nodes at every vertex."""
    if not 1 <= t <= T_MAX:
        raise EngineError(f"t={t} outside the engine range 1..{T_MAX}")
    if reduced and not filters:
        log.info("reduced systems need filters; running full systems only")
    bundle = bundle or get_bundle(t, "orbit")
    if bundle.t < t or bundle.mode != "orbit":
        raise EngineError("matrix bundle does not cover the requested families")
    atlas = bundle.atlas
    order = atlas.ids(t, "orbit")
    dtype = _count_dtype(g, t)
    ga = GraphArrays(g, dtype)
    values = initial_table(g, atlas, t, dtype)
    stats = RunStats(g.n)
    masks = {}
    n = g.n
    all_v = np.arange(n, dtype=np.int64)
    for s in range(3, t + 1):
        off = len(atlas.ids(s - 1, "orbit"))
        nf = len(atlas.family_ids(s, "orbit"))
        K = nf - 1
        prec = values[:, :off]
        u = bundle.U[s].data
        if filters:
            mask = apply_filters(s, prec, bundle)
            all_zero = mask.zero.all(axis=1)
        else:
            mask = None
            all_zero = np.zeros(n, dtype=bool)
        active = all_v[~all_zero]
        gross = np.zeros((n, nf), dtype=dtype)
        gross[active, :K] = family_gross(ga, atlas, s, prec, active, workers)
        if filters:
            known = np.ones(nf, dtype=bool)
            known[K] = False
            intra_family_filter(mask, gross[active], u, known, off, active)
            all_zero = mask.zero.all(axis=1)
        has_zero = mask.zero.any(axis=1) if filters else np.zeros(n, dtype=bool)
        use_reduced = has_zero & ~all_zero & reduced & filters
        full = ~all_zero & ~use_reduced
        full_v = all_v[full]
        gross[full_v, K] = clique_gross(ga, s, full_v, workers)
        net = np.zeros((n, nf), dtype=dtype)
        net[full_v] = convert(s, gross[full_v], bundle)
        if use_reduced.any():
            pri = _zero_priority(u)
            red_v = all_v[use_reduced]
            choice = pri[mask.zero[np.ix_(red_v, pri)].argmax(axis=1)]
            for j in np.unique(choice):
                vs = red_v[choice == j]
                net[vs] = convert(s, gross[vs], bundle, zero_col=int(j))
        if (net < 0).any():
            raise EngineError(f"negative net count in family {s}")
        if filters and (net[mask.zero] != 0).any():
            raise EngineError(f"filter flagged a nonzero count in family {s}")
        values[:, off : off + nf] = net
        zero_full = full & (net == 0).any(axis=1)
        counts = {
            "zero_by_filter": int(all_zero.sum()),
            "reduced": int(use_reduced.sum()),
            "zero_by_full_system": int(zero_full.sum()),
            "full": int((full & ~zero_full).sum()),
        }
        per_graphlet = {}
        if filters:
            zc = mask.zero.sum(axis=0)
            fam = atlas.family_ids(s, "orbit")
            per_graphlet = {str(fam[j]): int(zc[j]) for j in range(nf)}
        stats.families[s] = {
            "counts": counts,
            "percent": {k: (100.0 * c / n if n else 0.0) for k, c in counts.items()},
            "zero_by_filter_per_graphlet": per_graphlet,
        }
        masks[s] = mask
    table = FrequencyTable(order, values, t, g.labels, "net", "orbit")
    if return_masks:
        return table, stats, masks
    return table, stats


def aggregate_orbits(table: FrequencyTable, atlas: Atlas) -> FrequencyTable:
    """Per-pattern counts: the sum over each pattern's orbits."""
    order = atlas.ids(table.t, "hatted")
    out = np.zeros((table.values.shape[0], len(order)), dtype=table.values.dtype)
    index = {(g.s, g.p): i for i, g in enumerate(order)}
    for j, gid in enumerate(table.order):
        out[:, index[(gid.s, gid.p)]] += table.values[:, j]
    return FrequencyTable(order, out, table.t, table.labels, table.kind, "hatted")


def run_stats(stats: RunStats) -> dict:
    return stats.to_dict()


# ---------------------------------------------------------------- output


def _label(table, v):
    return table.labels[v] if table.labels else v


def write_csv(table: FrequencyTable, dest, header: dict | None = None, only=None) -> None:
    """Long CSV, one row per (vertex, graphlet); ``dest`` is a path or a text stream."""
    if hasattr(dest, "write"):
        _write_csv(table, dest, header, only)
        return
    with open(dest, "w", encoding="utf-8") as fh:
        _write_csv(table, fh, header, only)


def _write_csv(table, fh, header, only):
    cols = range(len(table.order)) if only is None else [table.order.index(GraphletId(*g)) for g in only]
    for k, v in (header or {}).items():
        fh.write(f"# {k}: {v}\n")
    fh.write("vertex_label,graphlet_s,graphlet_p,graphlet_sigma,net_count\n")
    for v in range(table.values.shape[0]):
        lab = _label(table, v)
        for j in cols:
            gid = table.order[j]
            fh.write(f"{lab},{gid.s},{gid.p},{gid.sigma},{int(table.values[v, j])}\n")


def write_json(table: FrequencyTable, path, header: dict | None = None, only=None) -> None:
    cols = range(len(table.order)) if only is None else [table.order.index(GraphletId(*g)) for g in only]
    doc = {
        "header": header or {},
        "vertex_label": [_label(table, v) for v in range(table.values.shape[0])],
        "graphlets": [list(table.order[j]) for j in cols],
        "net_count": [[int(x) for x in table.values[:, j]] for j in cols],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def write_stats(stats: RunStats, path, header: dict | None = None) -> None:
    doc = {"header": header or {}, **stats.to_dict()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
