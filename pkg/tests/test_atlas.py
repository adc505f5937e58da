import itertools
import math

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsurf import kernels
from gsurf.atlas import Atlas, AtlasError, GraphletId, build_atlas, enumerate_family
from gsurf.smallgraph import SmallGraph, adj_from_bits, permute_bits

from golden import FAMILY_SIZES_HATTED, FAMILY_SIZES_ORBIT

HATTED = FAMILY_SIZES_HATTED[:6]
ORBIT = FAMILY_SIZES_ORBIT[:6]


def _nx(pat):
    g = nx.Graph()
    g.add_nodes_from(range(pat.s))
    g.add_edges_from(pat.graph.edges())
    return g


def _nx_orbits(g):
    """Orbit partition from networkx automorphisms (independent of the atlas)."""
    gm = nx.algorithms.isomorphism.GraphMatcher(g, g)
    parent = {v: v for v in g}
    n_aut = 0
    for phi in gm.isomorphisms_iter():
        n_aut += 1
        for v, w in phi.items():
            a, b = min(parent[v], parent[w]), max(parent[v], parent[w])
            for x in parent:
                if parent[x] == b:
                    parent[x] = a
    return sorted(sorted(c) for c in _classes(parent)), n_aut


def _classes(parent):
    out = {}
    for v, r in parent.items():
        out.setdefault(r, []).append(v)
    return list(out.values())


@pytest.mark.parametrize("s", range(1, 7))
def test_family_sizes(s):
    atlas = build_atlas(6)
    assert atlas.n_patterns(s) == HATTED[s - 1]
    assert atlas.n_graphlets(s) == ORBIT[s - 1]


def test_connected_graphs_match_networkx_atlas():
    """Pattern and orbit counts per (s, m) agree with networkx's graph atlas."""
    atlas = build_atlas(6)
    ref = {}
    for g in nx.graph_atlas_g()[1:]:
        if g.number_of_nodes() <= 6 and nx.is_connected(g):
            key = (g.number_of_nodes(), g.number_of_edges())
            classes, _ = _nx_orbits(g)
            ref.setdefault(key, []).append(len(classes))
    got = {}
    for s in range(1, 7):
        for pat in atlas.family(s):
            got.setdefault((s, pat.m), []).append(pat.n_orbits)
    assert {k: sorted(v) for k, v in got.items()} == {k: sorted(v) for k, v in ref.items()}


def test_s3_order():
    atlas = build_atlas(3)
    wedge, tri = atlas.family(3)
    assert (wedge.m, tri.m) == (2, 3)
    assert atlas.family_ids(3) == [(3, 1, 1), (3, 1, 2), (3, 2, 1)]
    # orbit 1 holds the leaves, orbit 2 the center
    assert wedge.graph.degrees()[wedge.rep(1)] == 1
    assert wedge.graph.degrees()[wedge.rep(2)] == 2


def test_s4_order():
    atlas = build_atlas(4)
    names = {
        "claw": nx.star_graph(3),
        "P4": nx.path_graph(4),
        "paw": nx.Graph([(0, 1), (1, 2), (0, 2), (2, 3)]),
        "C4": nx.cycle_graph(4),
        "diamond": nx.Graph([(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]),
        "K4": nx.complete_graph(4),
    }
    pats = atlas.family(4)
    for pat, ref in zip(pats, names.values()):
        assert nx.is_isomorphic(_nx(pat), ref)
    assert [p.n_orbits for p in pats] == [2, 2, 3, 1, 2, 1]


def test_small_families():
    atlas = build_atlas(5)
    assert atlas.family_ids(1) == [(1, 1, 1)]
    assert atlas.family_ids(2) == [(2, 1, 1)]
    assert atlas.family_ids(2, "hatted") == [(2, 1, 0)]
    assert len(atlas.ids(5)) == 74
    assert len(atlas.ids(5, "hatted")) == 31


def test_lookup():
    atlas = build_atlas(4)
    g, orb = atlas.lookup((4, 6, 1))
    assert g.is_clique() and set(orb) == {1}
    g, _ = atlas.lookup((3, 2, 1))
    assert g.s == 3 and g.is_clique()
    g, orb = atlas.lookup((1, 1, 1))
    assert g.s == 1 and orb == (1,)
    with pytest.raises(AtlasError):
        atlas.lookup((4, 1, 3))
    with pytest.raises(AtlasError):
        atlas.lookup((4, 9, 1))
    assert str(GraphletId(4, 2, 2)) == "H_4,2,2"


@pytest.mark.parametrize("s", range(1, 6))
def test_orbits_and_automorphisms_match_networkx(s):
    atlas = build_atlas(5)
    for pat in atlas.family(s):
        classes, n_aut = _nx_orbits(_nx(pat))
        mine = sorted(sorted(pat.members(o)) for o in range(1, pat.n_orbits + 1))
        assert mine == classes
        assert pat.aut == n_aut
        assert math.factorial(s) % pat.aut == 0


@pytest.mark.parametrize("s", range(2, 6))
def test_orbit_witnesses(s):
    """Same orbit: an explicit automorphism maps the representative to each member."""
    atlas = build_atlas(5)
    for pat in atlas.family(s):
        auts = [p for p in itertools.permutations(range(s)) if permute_bits(s, pat.bits, p) == pat.bits]
        assert len(auts) == pat.aut
        for o in range(1, pat.n_orbits + 1):
            r = pat.rep(o)
            assert {p[r] for p in auts} == set(pat.members(o))


def test_cliques():
    atlas = build_atlas(6)
    for s in range(1, 7):
        k = atlas.family(s)[-1]
        assert k.is_clique() and k.n_orbits == 1 and k.aut == math.factorial(s)


def test_edge_count_monotone():
    atlas = build_atlas(6)
    for s in range(1, 7):
        ms = [p.m for p in atlas.family(s)]
        assert ms == sorted(ms)


def test_orbit_representatives_are_minimal():
    atlas = build_atlas(6)
    for s in range(1, 7):
        for pat in atlas.family(s):
            reps = [pat.rep(o) for o in range(1, pat.n_orbits + 1)]
            assert all(pat.orbit_of[r] == o for o, r in enumerate(reps, 1))


def test_determinism():
    fresh = build_atlas.__wrapped__(5)
    assert list(fresh.records()) == list(build_atlas(5).records())
    assert fresh.hash == build_atlas(5).hash


def test_enumerate_family_counts():
    prev = None
    for s, want in zip(range(1, 7), HATTED):
        found = enumerate_family(s, prev)
        assert len(found) == want
        prev = build_atlas(s).family(s)


def test_no_residual_ties():
    assert build_atlas(6).tie_events == []


def test_export_load_round_trip(tmp_path):
    atlas = build_atlas(5)
    path = tmp_path / "atlas.txt"
    atlas.export(path)
    header = path.read_text().splitlines()[0]
    assert atlas.hash in header
    back = Atlas.load(path)
    assert back.hash == atlas.hash
    assert back.family_ids(5) == atlas.family_ids(5)


def test_load_rejects_non_canonical(tmp_path):
    atlas = build_atlas(3)
    path = tmp_path / "atlas.txt"
    atlas.export(path)
    lines = path.read_text().splitlines()
    # relabel the wedge so its center moves: a valid graph, not canonical
    bad = []
    for line in lines:
        parts = line.split()
        if not line.startswith("#") and parts[:2] == ["3", "1"]:
            bits = int(parts[4], 16)
            other = next(permute_bits(3, bits, p) for p in itertools.permutations(range(3)) if permute_bits(3, bits, p) != bits)
            parts[4] = f"{other:x}"
            line = " ".join(parts)
        bad.append(line)
    path.write_text("\n".join(bad) + "\n")
    with pytest.raises(AtlasError):
        Atlas.load(path)


def test_classify_disconnected_and_unknown():
    atlas = build_atlas(4)
    two_edges = SmallGraph.from_edges(4, [(0, 1), (2, 3)])
    assert atlas.classify_graph(two_edges) is None
    p, orbits = atlas.classify_graph(SmallGraph.from_edges(3, [(0, 1), (1, 2)]))
    assert p == 1 and orbits == (1, 2, 1)


# ------------------------------------------------------------ canonical form


def test_canonical_relabelled_path():
    a = SmallGraph.from_edges(3, [(0, 1), (1, 2)])
    b = SmallGraph.from_edges(3, [(2, 0), (0, 1)])
    assert a.canonical()[0] == b.canonical()[0]


def test_canonical_claw_vs_path():
    claw = SmallGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    path = SmallGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert claw.canonical()[0] != path.canonical()[0]


def test_canonical_position_realizes_form():
    g = SmallGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 4)])
    cbits, pos, _, _ = g.canonical()
    assert permute_bits(5, g.bits, pos) == cbits


@st.composite
def labelled_graph(draw, max_s=7):
    s = draw(st.integers(1, max_s))
    bits = draw(st.integers(0, (1 << (s * (s - 1) // 2)) - 1))
    perm = draw(st.permutations(list(range(s))))
    return s, bits, perm


@settings(max_examples=200, deadline=None)
@given(labelled_graph())
def test_canonical_invariant_under_relabelling(case):
    s, bits, perm = case
    a = kernels.canonical_form(s, adj_from_bits(s, bits))
    b = kernels.canonical_form(s, adj_from_bits(s, permute_bits(s, bits, perm)))
    assert a[0] == b[0] and a[2] == b[2]


@settings(max_examples=200, deadline=None)
@given(labelled_graph(max_s=6))
def test_classify_orbits_follow_relabelling(case):
    s, bits, perm = case
    atlas = build_atlas(6)
    a = atlas.classify(s, bits)
    b = atlas.classify(s, permute_bits(s, bits, perm))
    if a is None:
        assert b is None
        return
    assert a[0] == b[0]
    assert all(a[1][v] == b[1][perm[v]] for v in range(s))


@settings(max_examples=100, deadline=None)
@given(labelled_graph(max_s=8))
def test_canonical_backend_parity(case):
    s, bits, _ = case
    adj = adj_from_bits(s, bits)
    c = kernels.canonical_form(s, adj)
    p = kernels.canonical_form(s, adj, force_python=True)
    assert c[0] == p[0] and c[2] == p[2] and tuple(c[3]) == tuple(p[3])
