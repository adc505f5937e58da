"""Command-line entry point: ``gsurf {atlas,matrices,count,verify,hasse}``.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .atlas import GraphletId, build_atlas
from .conversion import (
    ConversionError,
    MatrixBundle,
    build_U,
    default_cache_dir,
    exact_det,
    get_bundle,
    invert_involutory,
    signs,
)
from .engine import T_MAX, EngineError, aggregate_orbits, run, write_csv, write_json, write_stats
from .graph import GraphFormatError, load_graph
from .lattice import build_lattice, export_hasse
from .oracle import BudgetExceeded, brute_net

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("gsurf")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _config_header(args) -> dict:
    cfg = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}
    return {"gsurf": __version__, "backend": kernels.BACKEND, "config": json.dumps(cfg, sort_keys=True)}


def _parse_gid(text: str) -> GraphletId:
    try:
        s, p, sigma = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"graphlet must be 's,p,sigma', got {text!r}")
    return GraphletId(s, p, sigma)


# ---------------------------------------------------------------- commands


def cmd_atlas(args) -> int:
    if not 1 <= args.max <= 8:
        raise UsageError("--max must be in 1..8")
    t0 = time.perf_counter()
    atlas = build_atlas(args.max)
    print(f"{'s':>2} {'patterns':>9} {'graphlets':>10}")
    for s in range(1, args.max + 1):
        print(f"{s:>2} {atlas.n_patterns(s):>9} {atlas.n_graphlets(s):>10}")
    print(f"atlas hash {atlas.hash} ({time.perf_counter() - t0:.1f}s, residual ties: {len(atlas.tie_events)})")
    if args.out:
        atlas.export(args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def _golden_hatted_u4():
    from importlib.resources import files

    rows = []
    for line in files("gsurf").joinpath("data/golden_U4_hatted.txt").read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            rows.append([int(x) for x in line.split()])
    return np.array(rows, dtype=np.int64)


def cmd_matrices(args) -> int:
    if not 1 <= args.t <= 7:
        raise UsageError("--t must be in 1..7")
    if args.t == 7:
        log.warning("t=7 matrices are expensive")
    atlas = build_atlas(args.t)
    ok = True
    for s in range(1, args.t + 1):
        u = build_U(atlas, s, args.mode)
        try:
            inv = invert_involutory(u, signs(atlas, s, args.mode))
            det = exact_det(u.data.tolist()) if len(u.rows) <= 60 else 1
            inv_ok = det == 1
        except ConversionError as exc:
            print(f"s={s}: {exc}")
            ok = inv_ok = False
            inv = None
        same = inv is not None and np.array_equal(inv.data != 0, u.data != 0)
        print(
            f"s={s} mode={args.mode} shape={u.shape[0]}x{u.shape[1]} nnz={u.nnz()} "
            f"involution={'ok' if inv is not None else 'FAIL'} det={'1' if inv_ok else 'FAIL'} "
            f"inverse_nnz={inv.nnz() if inv is not None else '-'} same_pattern={same}"
        )
        ok = ok and inv_ok and same
        if s == 4 and args.mode == "hatted":
            match = np.array_equal(u.data, _golden_hatted_u4())
            print(f"s=4 hatted golden matrix: {'match' if match else 'MISMATCH'}")
            ok = ok and match
    out = Path(args.out) if args.out else default_cache_dir() / atlas.hash
    if args.t <= 6:
        bundle = MatrixBundle.build(atlas, args.t, args.mode)
        for p in bundle.save(out):
            print(f"wrote {p}")
    return EXIT_OK if ok else EXIT_VERIFY


def _load_input(args):
    try:
        return load_graph(args.input, args.format)
    except FileNotFoundError as exc:
        raise OSError(f"cannot read {args.input}: {exc.strerror}") from exc


def _bundle(args, t):
    if getattr(args, "matrices", None):
        return MatrixBundle.load(build_atlas(t), t, "orbit", args.matrices)
    return get_bundle(t, "orbit")


def cmd_count(args) -> int:
    if not 1 <= args.t <= T_MAX:
        raise UsageError(f"--t must be in 1..{T_MAX}")
    g = _load_input(args)
    only = [_parse_gid(x) for x in args.graphlet] if args.graphlet else None
    bundle = _bundle(args, args.t)
    t0 = time.perf_counter()
    table, stats = run(g, args.t, not args.no_filters, not args.no_reduced, args.workers, bundle=bundle)
    elapsed = time.perf_counter() - t0
    if args.hatted:
        table = aggregate_orbits(table, bundle.atlas)
    if only:
        for gid in only:
            if gid not in table.order:
                raise UsageError(f"graphlet {gid} not in the {table.mode} table for t={args.t}")
    header = _config_header(args) | {"atlas": bundle.atlas.hash, "n": g.n, "m": g.m}
    write_csv(table, args.out if args.out else sys.stdout, header, only)
    if args.json:
        write_json(table, args.json, header, only)
    if args.stats is not None:
        stats_path = args.stats or (str(args.out) + ".stats.json" if args.out else None)
        doc_header = header | {"seconds": round(elapsed, 3)}
        if stats_path:
            write_stats(stats, stats_path, doc_header)
        else:
            print(json.dumps({"header": doc_header, **stats.to_dict()}, indent=2), file=sys.stderr)
    log.info("count finished in %.3fs", elapsed)
    return EXIT_OK


def cmd_verify(args) -> int:
    if not 1 <= args.t <= T_MAX:
        raise UsageError(f"--t must be in 1..{T_MAX}")
    g = _load_input(args)
    bundle = _bundle(args, args.t)
    table, _ = run(g, args.t, bundle=bundle)
    res = brute_net(g, args.t, bundle.atlas, budget=args.budget)
    ref = np.array(res.net, dtype=object)
    got = np.array(table.values, dtype=object)
    diff = np.argwhere(ref != got)
    for j, gid in enumerate(table.order):
        col = [int(x) for x in got[:, j]]
        if col and min(col) == max(col):
            print(f"f({gid})(v)={col[0]} for all v")
        elif col:
            print(f"f({gid})(v) in [{min(col)}, {max(col)}]")
    if len(diff):
        v, j = diff[0]
        print(
            f"FAIL: {len(diff)} mismatches; first at vertex {table.labels[v]} graphlet {table.order[j]}: "
            f"engine {got[v, j]} oracle {ref[v, j]}"
        )
        return EXIT_VERIFY
    print(f"PASS: engine equals oracle on n={g.n} m={g.m} t={args.t} ({len(table.order)} graphlets)")
    return EXIT_OK


def cmd_hasse(args) -> int:
    if not 1 <= args.t <= 6:
        raise UsageError("--t must be in 1..6")
    lat = build_lattice(build_atlas(args.t), args.t, args.mode)
    export_hasse(lat, args.out)
    print(f"wrote {args.out}: {len(lat.elements)} nodes, {len(lat.covers)} covering edges")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gsurf", description="Graphlet atlas, conversion matrices and per-vertex graphlet counts.")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"gsurf {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("atlas", help="enumerate graphlet families and print their sizes")
    a.add_argument("--max", type=int, required=True, help="largest family size (1..8)")
    a.add_argument("--out", type=Path, help="write the atlas export here")
    a.set_defaults(func=cmd_atlas)

    m = sub.add_parser("matrices", help="build, verify and store the conversion matrices")
    m.add_argument("--t", type=int, required=True, help="build families 1..t (1..7)")
    m.add_argument("--mode", choices=("orbit", "hatted"), default="orbit")
    m.add_argument("--out", type=Path, help="output directory (default: cache)")
    m.set_defaults(func=cmd_matrices)

    def graph_args(q):
        q.add_argument("--input", required=True, help="edge list or Matrix Market file")
        q.add_argument("--format", choices=("auto", "edges", "mtx"), default="auto")
        q.add_argument("--t", type=int, required=True, help=f"largest graphlet size (1..{T_MAX})")
        q.add_argument("--matrices", type=Path, help="load matrices from this directory")

    c = sub.add_parser("count", help="net frequency maps of all graphlets up to t nodes")
    graph_args(c)
    c.add_argument("--no-filters", action="store_true", help="disable zero-count filters")
    c.add_argument("--no-reduced", action="store_true", help="always solve the full system")
    c.add_argument("--workers", type=int, default=1, help="vertex-parallel worker threads")
    c.add_argument("--hatted", action="store_true", help="report per-pattern sums over orbits")
    c.add_argument("--graphlet", action="append", help="restrict output to s,p,sigma (repeatable)")
    c.add_argument("--out", type=Path, help="CSV output (default: stdout)")
    c.add_argument("--json", type=Path, help="also write the columnar JSON variant")
    c.add_argument("--stats", nargs="?", const="", default=None, help="write run statistics JSON (default: <out>.stats.json, or stderr)")
    c.set_defaults(func=cmd_count)

    v = sub.add_parser("verify", help="compare engine output with the brute-force oracle")
    graph_args(v)
    v.add_argument("--budget", type=int, default=10**7, help="refuse the oracle when sum of C(n, s), s <= t, exceeds this")
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("hasse", help="write the Hasse diagram of the graphlet lattice as DOT")
    h.add_argument("--t", type=int, required=True, help="largest graphlet size (1..6)")
    h.add_argument("--mode", choices=("orbit", "hatted"), default="orbit")
    h.add_argument("--out", type=Path, required=True)
    h.set_defaults(func=cmd_hasse)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gsurf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConversionError, EngineError) as exc:
        print(f"gsurf: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except BudgetExceeded as exc:
        print(f"gsurf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphFormatError) as exc:
        print(f"gsurf: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
