"""Simple undirected source graphs in compressed sparse row form.

Every loader normalizes its input by default: the edge set is symmetrized,
duplicate edges collapse and self-loops are dropped.  ``strict=True`` turns
each of those repairs into a :class:`GraphFormatError` instead.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np


class GraphFormatError(ValueError):
    """Malformed graph input; ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class SourceGraph:
    """Immutable simple undirected graph.

    ``indptr``/``indices`` hold strictly increasing neighbor lists; ``labels``
    maps internal ids ``0..n-1`` back to the identifiers found in the input.
    """

    n: int
    m: int
    indptr: np.ndarray
    indices: np.ndarray
    labels: tuple = field(default=())

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(self.n)))

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        k = int(np.searchsorted(nb, v))
        return k < len(nb) and nb[k] == v

    def edges(self) -> np.ndarray:
        """Edges ``(u, v)`` with ``u < v`` as an ``(m, 2)`` array."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        mask = rows < self.indices
        return np.column_stack([rows[mask], self.indices[mask]])

    @property
    def max_degree(self) -> int:
        return int(np.diff(self.indptr).max()) if self.n else 0

    def reverse_positions(self) -> np.ndarray:
        """For CSR position ``p`` of arc ``a->b``, the position of ``b->a``."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        # arcs sorted by (col, row) line up with the (row, col) order of their reverses
        order = np.lexsort((rows, self.indices))
        rev = np.empty_like(order)
        rev[order] = np.arange(len(order))
        return rev

    def check(self) -> None:
        """Assert the structural invariants; used by tests and strict loaders."""
        assert self.indptr.shape == (self.n + 1,)
        assert self.indptr[0] == 0 and self.indptr[-1] == 2 * self.m
        for v in range(self.n):
            nb = self.neighbors(v)
            assert np.all(np.diff(nb) > 0), f"neighbors of {v} not strictly increasing"
            assert not np.any(nb == v), f"self-loop at {v}"
        rev = self.reverse_positions()
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        assert np.array_equal(self.indices[rev], rows), "adjacency not symmetric"

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int]],
        n: int | None = None,
        labels: Sequence[Hashable] | None = None,
        strict: bool = False,
    ) -> "SourceGraph":
        """Build from 0-based integer edge pairs."""
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if n is None:
            n = int(arr.max()) + 1 if len(arr) else (len(labels) if labels else 0)
        if len(arr) and (arr.min() < 0 or arr.max() >= n):
            raise GraphFormatError("edge endpoint out of range")
        loops = arr[:, 0] == arr[:, 1]
        if strict and loops.any():
            raise GraphFormatError(f"self-loop at vertex {int(arr[loops][0, 0])}")
        arr = arr[~loops]
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        key = np.unique(lo * n + hi) if n else np.zeros(0, dtype=np.int64)
        if strict and len(key) != len(arr):
            raise GraphFormatError("duplicate edge")
        lo, hi = key // max(n, 1), key % max(n, 1)
        return cls._from_unique_pairs(n, lo, hi, labels)

    @classmethod
    def _from_unique_pairs(cls, n, lo, hi, labels) -> "SourceGraph":
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(
            n=n,
            m=len(lo),
            indptr=indptr,
            indices=dst.astype(np.int64),
            labels=tuple(labels) if labels is not None else (),
        )

    @classmethod
    def from_networkx(cls, nxg) -> "SourceGraph":
        nodes = list(nxg.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        edges = [(index[u], index[v]) for u, v in nxg.edges()]
        return cls.from_edges(edges, n=len(nodes), labels=nodes)

    def subgraph(self, vertices: Sequence[int]) -> "SourceGraph":
        """Induced subgraph on ``vertices`` (relabelled in the given order)."""
        vertices = [int(v) for v in vertices]
        index = {v: i for i, v in enumerate(vertices)}
        edges = []
        for v in vertices:
            for u in self.neighbors(v):
                u = int(u)
                if u in index and v < u:
                    edges.append((index[v], index[u]))
        return SourceGraph.from_edges(
            edges, n=len(vertices), labels=[self.labels[v] for v in vertices]
        )


def _parse_token(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def load_edge_list(path: str | os.PathLike, strict: bool = False) -> SourceGraph:
    """Read a whitespace-separated edge list (``#`` starts a comment line).

    Integer tokens are kept as integers and numbered in ascending order;
    otherwise labels are numbered in order of first appearance.
    """
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            if len(toks) < 2:
                raise GraphFormatError(f"expected two vertex tokens, got {line!r}", lineno)
            pairs.append((_parse_token(toks[0]), _parse_token(toks[1])))

    seen: dict = {}
    for a, b in pairs:
        seen.setdefault(a, None)
        seen.setdefault(b, None)
    labels = list(seen)
    if labels and all(isinstance(x, int) for x in labels):
        labels.sort()
    index = {lab: i for i, lab in enumerate(labels)}
    edges = np.array([(index[a], index[b]) for a, b in pairs], dtype=np.int64).reshape(-1, 2)
    if strict:
        _check_symmetric_input(edges)
    return SourceGraph.from_edges(edges, n=len(labels), labels=labels, strict=strict)


def _check_symmetric_input(edges: np.ndarray) -> None:
    # strict mode: an edge listed in both directions counts as a duplicate
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    pairs = set()
    for a, b in zip(lo.tolist(), hi.tolist()):
        if (a, b) in pairs:
            raise GraphFormatError(f"duplicate edge {a}-{b}")
        pairs.add((a, b))


_MM_FIELDS = {"pattern", "real", "integer", "double"}
_MM_SYMMETRY = {"general", "symmetric"}


def load_matrix_market(path: str | os.PathLike, strict: bool = False) -> SourceGraph:
    """Read a Matrix Market coordinate file as an undirected pattern graph.

    Values are ignored, directed entries are symmetrized and diagonal entries
    dropped.  Vertex labels are the 1-based matrix indices.
    """
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        toks = header.strip().split()
        if len(toks) != 5 or toks[0] != "%%MatrixMarket" or toks[1].lower() != "matrix":
            raise GraphFormatError(f"not a Matrix Market header: {header.strip()!r}", 1)
        fmt, fld, sym = (t.lower() for t in toks[2:])
        if fmt != "coordinate":
            raise GraphFormatError(f"unsupported format {fmt!r} (need coordinate)", 1)
        if fld not in _MM_FIELDS:
            raise GraphFormatError(f"unsupported field {fld!r}", 1)
        if sym not in _MM_SYMMETRY:
            raise GraphFormatError(f"unsupported symmetry {sym!r}", 1)

        lineno = 1
        size = None
        for line in fh:
            lineno += 1
            s = line.strip()
            if not s or s.startswith("%"):
                continue
            size = s.split()
            break
        if size is None or len(size) != 3:
            raise GraphFormatError("missing size line", lineno)
        rows, cols, nnz = (int(x) for x in size)
        if rows != cols:
            raise GraphFormatError(f"adjacency matrix must be square, got {rows}x{cols}", lineno)

        ij = np.empty((nnz, 2), dtype=np.int64)
        k = 0
        for line in fh:
            lineno += 1
            s = line.split()
            if not s or s[0].startswith("%"):
                continue
            if k >= nnz:
                raise GraphFormatError("more entries than declared", lineno)
            try:
                i, j = int(s[0]), int(s[1])
            except (ValueError, IndexError):
                raise GraphFormatError(f"malformed entry {line.strip()!r}", lineno) from None
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise GraphFormatError(f"index ({i}, {j}) outside {rows}x{cols}", lineno)
            ij[k] = (i - 1, j - 1)
            k += 1
        if k != nnz:
            raise GraphFormatError(f"expected {nnz} entries, found {k}", lineno)

    if strict:
        _check_symmetric_input(ij[ij[:, 0] != ij[:, 1]])
    return SourceGraph.from_edges(ij, n=rows, labels=range(1, rows + 1), strict=strict)


def load_graph(path: str | os.PathLike, fmt: str = "auto", strict: bool = False) -> SourceGraph:
    """Dispatch on ``fmt`` (``edgelist``, ``mtx`` or ``auto`` by extension)."""
    if fmt == "auto":
        fmt = "mtx" if str(path).endswith(".mtx") else "edgelist"
    if fmt == "mtx":
        return load_matrix_market(path, strict=strict)
    if fmt == "edgelist":
        return load_edge_list(path, strict=strict)
    raise ValueError(f"unknown graph format {fmt!r}")


def write_edge_list(g: SourceGraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# n={g.n} m={g.m}\n")
        for u, v in g.edges().tolist():
            fh.write(f"{g.labels[u]} {g.labels[v]}\n")


def degree_map(g: SourceGraph) -> np.ndarray:
    return np.diff(g.indptr)


def bfs_sample(g: SourceGraph, size: int, start: int | None = None) -> SourceGraph:
    """Induced subgraph on the first ``size`` vertices reached by BFS.

    Starts from the highest-degree vertex unless ``start`` is given and
    restarts from the next unvisited vertex when a component is exhausted.
    """
    size = min(size, g.n)
    deg = degree_map(g)
    if start is None:
        start = int(np.argmax(deg)) if g.n else 0
    seen = np.zeros(g.n, dtype=bool)
    order = []
    restart = iter(np.argsort(-deg, kind="stable").tolist())
    queue = deque([start])
    seen[start] = True
    while len(order) < size:
        if not queue:
            nxt = next(v for v in restart if not seen[v])
            seen[nxt] = True
            queue.append(nxt)
        v = queue.popleft()
        order.append(v)
        for u in g.neighbors(v).tolist():
            if not seen[u]:
                seen[u] = True
                queue.append(u)
    return g.subgraph(order)


def zachary_karate_club() -> SourceGraph:
    """The 34-member karate club friendship network bundled with the package."""
    here = os.path.join(os.path.dirname(__file__), "data", "zachary.txt")
    return load_edge_list(here)
