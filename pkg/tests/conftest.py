import os

import networkx as nx
import numpy as np
import pytest

from gsurf.atlas import build_atlas
from gsurf.conversion import MatrixBundle
from gsurf.graph import SourceGraph, zachary_karate_club

CORPUS_SIZE = 110
CORPUS_SEED = 20240611


def random_connected(rng, n, density):
    """Connected G(n, p) sample: rejection until connected, then a spanning
    path patch if the density is too low to ever get there."""
    for _ in range(50):
        g = nx.gnp_random_graph(n, density, seed=int(rng.integers(2**31)))
        if nx.is_connected(g):
            return g
    perm = rng.permutation(n).tolist()
    g.add_edges_from(zip(perm, perm[1:]))
    return g


def make_corpus(size=CORPUS_SIZE, seed=CORPUS_SEED):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(size):
        n = int(rng.integers(5, 13))
        density = 0.1 + 0.8 * i / (size - 1)
        g = random_connected(rng, n, density)
        out.append((f"rand{i:03d}_n{n}_d{density:.2f}", SourceGraph.from_networkx(g)))
    return out


def hand_picked():
    return [
        ("C5", SourceGraph.from_networkx(nx.cycle_graph(5))),
        ("K6", SourceGraph.from_networkx(nx.complete_graph(6))),
        ("petersen", SourceGraph.from_networkx(nx.petersen_graph())),
        ("star7", SourceGraph.from_networkx(nx.star_graph(7))),
        ("path9", SourceGraph.from_networkx(nx.path_graph(9))),
    ]


# Two 8-vertex graphs with equal degree sequences whose wedge orbits split
# differently; vertex i is label i+1.
TWIN_G1 = [(0, 2), (0, 6), (1, 3), (1, 7), (2, 4), (2, 6), (3, 5), (3, 7), (4, 6), (4, 7), (5, 6), (5, 7), (6, 7)]
TWIN_G2 = [(0, 4), (0, 6), (1, 5), (1, 7), (2, 3), (2, 6), (2, 7), (3, 6), (3, 7), (4, 5), (4, 6), (5, 7), (6, 7)]


@pytest.fixture(scope="session")
def atlas5():
    return build_atlas(5)


@pytest.fixture(scope="session")
def bundle5(atlas5):
    return MatrixBundle.build(atlas5, 5, "orbit")


@pytest.fixture(scope="session")
def corpus():
    return make_corpus() + hand_picked()


@pytest.fixture(scope="session")
def zachary():
    return zachary_karate_club()


@pytest.fixture(scope="session")
def oracle_results(corpus, atlas5):
    from gsurf.oracle import brute_net

    return {name: brute_net(g, 5, atlas5) for name, g in corpus}


@pytest.fixture(scope="session")
def oracle_gross4(corpus, atlas5):
    from gsurf.oracle import brute_gross

    return {name: brute_gross(g, 4, atlas5) for name, g in corpus}


@pytest.fixture(scope="session")
def engine_results(corpus, bundle5):
    from gsurf.engine import run

    return {name: run(g, 5, bundle=bundle5, return_masks=True) for name, g in corpus}


def notredame_path():
    return os.environ.get("GSURF_NOTREDAME")


# ------------------------------------------------------------ acceptance log

ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and rep.skipped):
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (status, detail) in ACCEPTANCE.items():
        terminalreporter.write_line(f"{status:<5} {name}: {detail}")
