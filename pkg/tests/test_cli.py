import json
import os
import subprocess
import sys

import networkx as nx
import pytest

from gsurf.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main
from gsurf.graph import SourceGraph, write_edge_list, zachary_karate_club


@pytest.fixture(autouse=True)
def cache(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("GSURF_CACHE", str(d))
    return d


def _edges(tmp_path, nxg, name="g.txt"):
    path = tmp_path / name
    write_edge_list(SourceGraph.from_networkx(nxg), path)
    return path


def test_atlas(capsys, tmp_path):
    assert main(["atlas", "--max", "5", "--out", str(tmp_path / "a.txt")]) == EXIT_OK
    out = capsys.readouterr().out
    assert " 5        21         58" in out
    assert (tmp_path / "a.txt").exists()
    assert main(["atlas", "--max", "1"]) == EXIT_OK
    assert " 1         1          1" in capsys.readouterr().out
    assert main(["atlas", "--max", "9"]) == EXIT_USAGE


def test_matrices(capsys, tmp_path):
    assert main(["matrices", "--t", "5", "--out", str(tmp_path / "m")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "s=5 mode=orbit shape=58x58 nnz=744" in out
    assert (tmp_path / "m" / "Wt_5_orbit.txt").exists()
    assert main(["matrices", "--t", "4", "--mode", "hatted", "--out", str(tmp_path / "h")]) == EXIT_OK
    assert "s=4 hatted golden matrix: match" in capsys.readouterr().out
    assert main(["matrices", "--t", "2", "--out", str(tmp_path / "two")]) == EXIT_OK
    assert "s=2 mode=orbit shape=1x1 nnz=1" in capsys.readouterr().out


def test_count_zachary(capsys, tmp_path):
    src = tmp_path / "z.txt"
    write_edge_list(zachary_karate_club(), src)
    out = tmp_path / "z.csv"
    code = main(["count", "--input", str(src), "--t", "3", "--out", str(out), "--graphlet", "3,2,1", "--stats"])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    header = [l for l in lines if l.startswith("#")]
    assert any("atlas" in l for l in header) and any("config" in l for l in header)
    rows = [l.split(",") for l in lines if not l.startswith("#")][1:]
    assert len(rows) == 34
    tri = {r[0]: int(r[4]) for r in rows}
    assert max(tri, key=tri.get) in {"0", "33"}
    stats = json.loads((tmp_path / "z.csv.stats.json").read_text())
    assert "3" in stats["families"]


def test_count_stdout_json_hatted(capsys, tmp_path):
    src = _edges(tmp_path, nx.cycle_graph(5))
    code = main(["count", "--input", str(src), "--t", "4", "--hatted", "--json", str(tmp_path / "c.json")])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "0,4,2,0,4" in out  # 2 interior + 2 endpoint
    doc = json.loads((tmp_path / "c.json").read_text())
    assert [4, 2, 0] in doc["graphlets"]


def test_count_options_agree(capsys, tmp_path):
    src = _edges(tmp_path, nx.gnp_random_graph(12, 0.4, seed=1))
    main(["count", "--input", str(src), "--t", "5"])
    a = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
    main(["count", "--input", str(src), "--t", "5", "--no-filters", "--no-reduced", "--workers", "2"])
    b = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
    assert a == b


def test_count_empty_graph(capsys, tmp_path):
    src = tmp_path / "empty.txt"
    src.write_text("# no edges\n")
    assert main(["count", "--input", str(src), "--t", "3"]) == EXIT_OK
    body = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
    assert body == ["vertex_label,graphlet_s,graphlet_p,graphlet_sigma,net_count"]


def test_count_errors(capsys, tmp_path):
    src = _edges(tmp_path, nx.path_graph(3))
    assert main(["count", "--input", str(tmp_path / "missing.txt"), "--t", "3"]) == EXIT_IO
    assert main(["count", "--input", str(src), "--t", "6"]) == EXIT_USAGE
    assert main(["count", "--input", str(src), "--t", "3", "--graphlet", "9,9,9"]) == EXIT_USAGE
    assert main(["count", "--input", str(src), "--t", "3", "--graphlet", "x"]) == EXIT_USAGE
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n2\n")
    assert main(["count", "--input", str(bad), "--t", "3"]) == EXIT_IO
    with pytest.raises(SystemExit) as exc:
        main(["count", "--t", "3"])
    assert exc.value.code == EXIT_USAGE


def test_verify_c5(capsys, tmp_path):
    src = _edges(tmp_path, nx.cycle_graph(5))
    assert main(["verify", "--input", str(src), "--t", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "f(H_4,2,2)(v)=2 for all v" in out
    assert "PASS" in out


def test_verify_random(capsys, tmp_path):
    for seed in range(3):
        src = _edges(tmp_path, nx.gnp_random_graph(10, 0.4, seed=seed), f"r{seed}.txt")
        assert main(["verify", "--input", str(src), "--t", "5"]) == EXIT_OK


def test_verify_budget(capsys, tmp_path):
    src = _edges(tmp_path, nx.path_graph(40))
    assert main(["verify", "--input", str(src), "--t", "5", "--budget", "100"]) == EXIT_USAGE


def test_verify_corrupted_matrices(capsys, tmp_path):
    mdir = tmp_path / "m"
    assert main(["matrices", "--t", "4", "--out", str(mdir)]) == EXIT_OK
    src = _edges(tmp_path, nx.cycle_graph(5))
    assert main(["verify", "--input", str(src), "--t", "4", "--matrices", str(mdir)]) == EXIT_OK
    u4 = mdir / "U_4_orbit.txt"
    lines = u4.read_text().splitlines()
    k = next(i for i, l in enumerate(lines) if not l.startswith("#") and l.split()[0] != l.split()[1])
    i, j, v = lines[k].split()
    lines[k] = f"{i} {j} {int(v) + 1}"
    u4.write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    assert main(["verify", "--input", str(src), "--t", "4", "--matrices", str(mdir)]) == EXIT_VERIFY
    assert "verification failed" in capsys.readouterr().err


def test_hasse(capsys, tmp_path):
    for t, mode, nodes in ((2, "orbit", 3), (4, "hatted", 11), (5, "orbit", 75)):
        out = tmp_path / f"h{t}{mode}.dot"
        assert main(["hasse", "--t", str(t), "--mode", mode, "--out", str(out)]) == EXIT_OK
        assert out.read_text().count("[label=") == nodes


def test_count_auto_builds_cache(cache, tmp_path):
    src = _edges(tmp_path, nx.path_graph(4))
    assert main(["count", "--input", str(src), "--t", "3"]) == EXIT_OK
    assert any(cache.rglob("Wt_3_orbit.txt"))


def test_console_script(tmp_path, cache):
    src = _edges(tmp_path, nx.complete_graph(4))
    env = dict(os.environ, GSURF_CACHE=str(cache))
    res = subprocess.run(
        [sys.executable, "-m", "gsurf.cli", "count", "--input", str(src), "--t", "4", "--graphlet", "4,6,1"],
        env=env,
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0, res.stderr
    assert "0,4,6,1,1" in res.stdout
    res = subprocess.run([sys.executable, "-m", "gsurf.cli", "bogus"], env=env, capture_output=True, text=True)
    assert res.returncode == EXIT_USAGE
