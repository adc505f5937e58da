"""Kernel backend selection.

The compiled extension is used when it imports and ``GSURF_PURE_PYTHON`` is
unset; otherwise everything runs on the pure-Python reference kernels.
Object (arbitrary precision) arrays always take the Python path.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

try:
    if os.environ.get("GSURF_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ckernels
except ImportError:  # pragma: no cover - exercised by the fallback CI leg
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"

INT64_LIMIT = 2**62


def _impl(name, force_python=False):
    if force_python or _ckernels is None:
        return getattr(_pykernels, name)
    return getattr(_ckernels, name)


def canonical_form(n: int, adj, force_python: bool = False):
    if n > 10:
        force_python = True
    return _impl("canonical_form", force_python)(n, adj)


def _is_int64(*arrays) -> bool:
    return all(a.dtype == np.int64 for a in arrays)


def _chunks(roots: np.ndarray, workers: int):
    if workers <= 1 or len(roots) < 2 * workers:
        return [roots]
    return np.array_split(roots, workers * 4)


def _run_chunked(fn, roots, workers, *args):
    parts = _chunks(roots, workers)
    if len(parts) == 1:
        return fn(roots, *args)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda r: fn(r, *args), parts))
    return np.concatenate(results)


def edge_triangle_sums(indptr, indices, wx, ea, eb, force_python=False):
    if _is_int64(wx, ea, eb) and not force_python and _ckernels is not None:
        return _ckernels.edge_triangle_sums(indptr, indices, wx, ea, eb)
    return _pykernels.edge_triangle_sums(indptr, indices, wx, ea, eb)


def core_hom(indptr, indices, roots, nbr, vw, ew, eidx, chz=None, chc=None, chmap=None, workers=1, force_python=False):
    roots = np.ascontiguousarray(roots, dtype=np.int64)
    arrays = [vw, ew] + ([chz, chc] if chz is not None else [])
    if _is_int64(*arrays) and not force_python and _ckernels is not None:
        nbr = np.ascontiguousarray(nbr, dtype=np.int8)
        eidx = np.ascontiguousarray(eidx, dtype=np.intc)
        vw = np.ascontiguousarray(vw)
        ew = np.ascontiguousarray(ew)
        if chz is not None:
            chz = np.ascontiguousarray(chz)
            chc = np.ascontiguousarray(chc)
            chmap = np.ascontiguousarray(chmap, dtype=np.int8)

        def fn(r):
            return _ckernels.core_hom(indptr, indices, r, nbr, vw, ew, eidx, chz, chc, chmap)

        return _run_chunked(fn, roots, workers)
    return _pykernels.core_hom(indptr, indices, roots, nbr, vw, ew, eidx, chz, chc, chmap)


def clique_counts(indptr, indices, roots, s, workers=1, force_python=False):
    roots = np.ascontiguousarray(roots, dtype=np.int64)
    if force_python or _ckernels is None:
        return _pykernels.clique_counts(indptr, indices, roots, s)

    def fn(r):
        return _ckernels.clique_counts(indptr, indices, r, s)

    return _run_chunked(fn, roots, workers)
