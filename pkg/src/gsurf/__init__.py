"""Graphlet encoding: atlas, lattice, conversion matrices and the G-SURF engine."""

__version__ = "0.1.0"

from .atlas import Atlas, GraphletId, Pattern, build_atlas
from .conversion import IntMatrix, MatrixBundle, SignDiagonal, build_U, build_inter_family, get_bundle
from .engine import FrequencyTable, RunStats, aggregate_orbits, run
from .graph import GraphFormatError, SourceGraph, load_graph, zachary_karate_club
from .kernels import BACKEND
from .lattice import GraphletLattice, build_lattice, export_hasse
from .oracle import brute_gross, brute_net

__all__ = [
    "Atlas",
    "BACKEND",
    "FrequencyTable",
    "GraphFormatError",
    "GraphletId",
    "GraphletLattice",
    "IntMatrix",
    "MatrixBundle",
    "Pattern",
    "RunStats",
    "SignDiagonal",
    "SourceGraph",
    "aggregate_orbits",
    "brute_gross",
    "brute_net",
    "build_U",
    "build_atlas",
    "build_inter_family",
    "build_lattice",
    "export_hasse",
    "get_bundle",
    "load_graph",
    "run",
    "zachary_karate_club",
]
