import itertools

import networkx as nx
import numpy as np
import pytest

from gsurf.atlas import build_atlas
from gsurf.engine import family_gross
from gsurf.graph import SourceGraph
from gsurf.homcount import GraphArrays, correction_coefficients, family_plans, hom_counts, make_plan, set_partitions
from gsurf.oracle import brute_gross

BELL = [1, 1, 2, 5, 15, 52, 203]


def brute_hom(g: SourceGraph, adj, root):
    """Rooted homomorphism counts by exhaustive assignment."""
    s = len(adj)
    edges = [(a, b) for a in range(s) for b in range(a + 1, s) if adj[a] >> b & 1]
    others = [u for u in range(s) if u != root]
    out = np.zeros(g.n, dtype=np.int64)
    for v in range(g.n):
        for img in itertools.product(range(g.n), repeat=s - 1):
            phi = dict(zip(others, img))
            phi[root] = v
            if all(g.has_edge(phi[a], phi[b]) for a, b in edges):
                out[v] += 1
    return out


def test_set_partitions():
    for n, b in enumerate(BELL):
        parts = list(set_partitions(n))
        assert len(parts) == b
        assert len(set(parts)) == b


@pytest.fixture(scope="module")
def atlas():
    return build_atlas(5)


@pytest.fixture(scope="module")
def small_graphs():
    return [
        SourceGraph.from_networkx(nx.gnp_random_graph(6, p, seed=k)) for k, p in enumerate((0.3, 0.5, 0.8))
    ] + [SourceGraph.from_networkx(nx.complete_graph(5)), SourceGraph.from_edges([(0, 1)], n=3)]


@pytest.mark.parametrize("s", [3, 4])
def test_hom_counts_brute_force(atlas, small_graphs, s):
    for g in small_graphs:
        ga = GraphArrays(g)
        roots = np.arange(g.n)
        for plan in family_plans(atlas, s):
            assert np.array_equal(hom_counts(ga, plan, roots), brute_hom(g, plan.adj, plan.root)), plan.gid


def test_hom_counts_brute_force_s5(atlas):
    g = SourceGraph.from_networkx(nx.gnp_random_graph(5, 0.7, seed=4))
    ga = GraphArrays(g)
    for plan in family_plans(atlas, 5):
        assert np.array_equal(hom_counts(ga, plan, np.arange(g.n)), brute_hom(g, plan.adj, plan.root)), plan.gid


def test_plans(atlas):
    plans = family_plans(atlas, 4)
    assert [p.gid for p in plans] == atlas.family_ids(4)[:-1]
    plan = make_plan(atlas, (4, 2, 2))
    assert plan.stab == 1  # P4 has two automorphisms and two interior nodes
    plan = make_plan(atlas, (4, 1, 2))
    assert plan.stab == 6  # claw center is fixed by all of S_3


def test_correction_coefficients_on_path(atlas):
    """Homs of the rooted 3-path minus injective maps: the fold back onto the root."""
    coef = correction_coefficients(atlas, 3, 1, atlas.pattern(3, 1).rep(1))
    ids = atlas.ids(2)
    nz = {ids[i]: int(c) for i, c in enumerate(coef) if c}
    assert nz == {(2, 1, 1): 1}


@pytest.mark.parametrize("dtype", [np.int64, object])
def test_family_gross_against_oracle(atlas, dtype):
    g = SourceGraph.from_networkx(nx.gnp_random_graph(10, 0.45, seed=8))
    ref = brute_gross(g, 5, atlas)
    ga = GraphArrays(g, dtype)
    roots = np.arange(g.n, dtype=np.int64)
    for s in (3, 4, 5):
        off = len(atlas.ids(s - 1))
        prec = np.asarray(ref.net[:, :off], dtype=dtype)
        got = family_gross(ga, atlas, s, prec, roots)
        cols = [ref.order.index(gid) for gid in atlas.family_ids(s)[:-1]]
        assert got.tolist() == ref.gross[:, cols].tolist()
