import itertools

import networkx as nx
import numpy as np
import pytest

from gsurf.atlas import build_atlas
from gsurf.conversion import build_U
from gsurf.graph import SourceGraph
from gsurf.oracle import BudgetExceeded, brute_gross, brute_net, connected_subsets, write_csv


def _g(nxg):
    return SourceGraph.from_networkx(nxg)


@pytest.fixture(scope="module")
def atlas():
    return build_atlas(5)


def test_triangle(atlas):
    res = brute_net(_g(nx.complete_graph(3)), 3, atlas)
    assert res.column((3, 2, 1)).tolist() == [1, 1, 1]
    assert res.column((3, 1, 1)).tolist() == [0, 0, 0]
    assert res.column((3, 1, 2)).tolist() == [0, 0, 0]


def test_star(atlas):
    res = brute_net(_g(nx.star_graph(3)), 3, atlas)
    assert res.column((3, 1, 2))[0] == 3
    assert res.column((3, 1, 1))[1:].tolist() == [2, 2, 2]


def test_c4_gross_paths(atlas):
    res = brute_gross(_g(nx.cycle_graph(4)), 4, atlas)
    assert res.global_gross[(4, 2)] == 4
    assert res.global_net.get((4, 2), 0) == 0
    assert res.global_net[(4, 4)] == 1


def test_connected_subsets_exactly_once():
    g = nx.gnp_random_graph(9, 0.4, seed=3)
    sg = _g(g)
    got = [frozenset(s) for s in connected_subsets(sg, 4)]
    assert len(got) == len(set(got))
    ref = {
        frozenset(c)
        for k in range(1, 5)
        for c in itertools.combinations(range(9), k)
        if nx.is_connected(g.subgraph(c))
    }
    assert set(got) == ref


def test_net_against_networkx_census(atlas):
    """Global induced counts per pattern from an independent networkx census."""
    g = nx.gnp_random_graph(10, 0.45, seed=11)
    res = brute_net(_g(g), 5, atlas)
    for k in range(2, 6):
        for pat in atlas.family(k):
            h = nx.Graph(pat.graph.edges())
            want = sum(
                1
                for c in itertools.combinations(range(10), k)
                if nx.is_connected(g.subgraph(c)) and nx.is_isomorphic(g.subgraph(c), h)
            )
            assert res.global_net.get((k, pat.p), 0) == want


def test_vertex_sums(atlas):
    g = nx.gnp_random_graph(9, 0.5, seed=5)
    res = brute_gross(_g(g), 5, atlas)
    for k in range(1, 6):
        for pat in atlas.family(k):
            cols = [res.order.index(pat.gid(o)) for o in range(1, pat.n_orbits + 1)]
            assert res.net[:, cols].sum() == k * res.global_net.get((k, pat.p), 0)
            assert res.gross[:, cols].sum() == k * res.global_gross.get((k, pat.p), 0)
    assert (res.net <= res.gross).all()


def test_clique_gross_equals_net(atlas):
    res = brute_gross(_g(nx.gnp_random_graph(9, 0.7, seed=2)), 5, atlas)
    for k in range(1, 6):
        gid = (k, atlas.n_patterns(k), 1)
        assert np.array_equal(res.column(gid, "net"), res.column(gid, "gross"))


@pytest.mark.parametrize("s", [3, 4, 5])
def test_gross_on_patterns_reproduces_U(atlas, s):
    u = build_U(atlas, s, "orbit")
    for j, gid in enumerate(u.cols):
        pat = atlas.pattern(gid.s, gid.p)
        g = SourceGraph.from_edges(pat.graph.edges(), n=pat.s)
        res = brute_gross(g, s, atlas)
        v = pat.rep(gid.sigma)
        fam = [res.order.index(r) for r in u.rows]
        assert res.gross[v, fam].tolist() == u.data[:, j].tolist()


def test_gross_net_identity_on_random_graphs(atlas):
    """U times net equals gross, family by family, at every vertex."""
    rng = np.random.default_rng(9)
    for _ in range(10):
        g = _g(nx.gnp_random_graph(int(rng.integers(4, 11)), float(rng.uniform(0.2, 0.8)), seed=int(rng.integers(1000))))
        res = brute_gross(g, 5, atlas)
        for s in range(1, 6):
            u = build_U(atlas, s, "orbit")
            cols = [res.order.index(r) for r in u.rows]
            net = res.net[:, cols].astype(np.int64)
            assert np.array_equal(net @ u.data.T, res.gross[:, cols].astype(np.int64))


def test_budget():
    g = _g(nx.path_graph(60))
    with pytest.raises(BudgetExceeded):
        brute_net(g, 5, budget=1000)


def test_csv(tmp_path, atlas):
    res = brute_net(_g(nx.cycle_graph(4)), 3, atlas)
    write_csv(res, tmp_path / "o.csv")
    lines = (tmp_path / "o.csv").read_text().splitlines()
    assert lines[0] == "# source oracle"
    assert lines[1] == "vertex_label,graphlet_s,graphlet_p,graphlet_sigma,net_count"
    assert len(lines) == 2 + 4 * len(res.order)
