import csv
import io
import json
import subprocess
import sys

import pytest

from sbmcount import cli
from sbmcount.cli import SchemaVersionError, load_result, main


@pytest.fixture
def triangle(tmp_path):
    p = tmp_path / "tri.txt"
    p.write_text("a b\nb c\nc a\nc d\n")
    return p


def run_cli(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_estimate_json(triangle, capsys):
    code, out, _ = run_cli(["estimate", triangle, "--sweeps", 200, "--burnin", 20, "--runs", 3, "--seed", 4, "--kmax", 3], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["map_k"] in (1, 2, 3)
    assert sum(doc["k_histogram"].values()) == pytest.approx(1.0)
    assert [r["run"] for r in doc["runs"]] == [0, 1, 2]
    assert doc["best_run"] in (0, 1, 2)
    assert doc["config"]["seed"] == 4 and doc["config"]["k_max"] == 3
    assert doc["config"]["flavor"] == {"degree_corrected": True}


def test_estimate_deterministic_and_to_file(triangle, tmp_path, capsys):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        code, _, _ = run_cli(["estimate", triangle, "--sweeps", 100, "--burnin", 10, "--runs", 2, "-o", path], capsys)
        assert code == 0
        outs.append(path.read_text())
    assert outs[0] == outs[1]
    assert load_result(tmp_path / "a.json")["command"] == "estimate"


def test_estimate_marginals_use_labels(triangle, capsys):
    code, out, _ = run_cli(
        ["estimate", triangle, "--sweeps", 100, "--burnin", 10, "--runs", 1, "--marginals", "--no-degree-correction"],
        capsys,
    )
    doc = json.loads(out)
    assert set(doc["consensus"]) == {"a", "b", "c", "d"}
    k = doc["marginals"]["k"]
    for row in doc["marginals"]["nodes"].values():
        assert len(row) == k and sum(row) == pytest.approx(1.0)
    assert doc["config"]["flavor"] == {"degree_corrected": False}


def test_estimate_gml(tmp_path, capsys):
    p = tmp_path / "g.gml"
    p.write_text('graph [ node [ id 1 label "x" ] node [ id 2 label "y" ] edge [ source 1 target 2 ] ]')
    code, out, _ = run_cli(["estimate", p, "--format", "gml", "--sweeps", 10, "--burnin", 0, "--runs", 1], capsys)
    assert code == 0 and json.loads(out)["n"] == 2


def test_long_protocol_preset():
    args = cli.build_parser().parse_args(["estimate", "x", "--long-protocol"])
    cfg = cli._sampler_config(args)
    assert (cfg.sweeps, cfg.burnin_sweeps, cfg.runs) == (50_000, 50_000, 10)


def test_defaults_match_short_protocol():
    args = cli.build_parser().parse_args(["estimate", "x"])
    cfg = cli._sampler_config(args)
    assert (cfg.sweeps, cfg.burnin_sweeps, cfg.runs, cfg.sample_interval) == (2000, 1000, 10, 1)


@pytest.mark.parametrize(
    "args",
    [
        ["estimate", "/nonexistent/file.txt"],
        ["estimate", "{tri}", "--runs", "0"],
        ["estimate", "{tri}", "--kmax", "99"],
        ["estimate", "{tri}", "--sweeps", "abc"],
        ["estimate", "{tri}", "--bogus"],
        ["oracle", "{tri}", "--kmax", "70"],
        ["frobnicate"],
        [],
    ],
)
def test_errors_exit_2(args, triangle, capsys):
    args = [a.format(tri=triangle) for a in args]
    code, _, err = run_cli(args, capsys)
    assert code == 2
    assert err


def test_malformed_input_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("1 2\n3\n")
    code, _, err = run_cli(["estimate", p], capsys)
    assert code == 2 and "line 2" in err


def test_oracle_json(triangle, capsys):
    code, out, _ = run_cli(["oracle", triangle, "--kmax", 2, "--no-degree-correction"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["command"] == "oracle"
    assert list(doc["k_histogram"]) == ["1", "2"]


def test_generate(tmp_path, capsys):
    path = tmp_path / "net.txt"
    code, _, _ = run_cli(["generate", "--k", 2, "--group-size", 10, "--c-in", 8, "--c-out", 1, "--seed", 3, "-o", path], capsys)
    assert code == 0
    from sbmcount.graph import read_graph
    from sbmcount.synth import read_planted

    g = read_graph(path)
    planted = read_planted(str(path) + ".planted")
    assert set(planted) <= {str(i) for i in range(20)}
    assert set(planted.values()) <= {0, 1}
    assert g.m > 0
    code, out, _ = run_cli(["generate", "--k", 2, "--group-size", 10, "--c-in", 8, "--c-out", 1, "--seed", 3], capsys)
    assert out == path.read_text()


def test_bench_groups_csv(capsys):
    args = ["bench-groups", "--ks", 2, "--group-size", 15, "--in-degree", 6, "--out-degree", 1, "--sweeps", 40, "--burnin", 10, "--runs", 2]
    code, out, _ = run_cli(args, capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows
    assert {r["schema_version"] for r in rows} == {"1"}
    assert {r["true_k"] for r in rows} == {"2"}
    assert sum(float(r["probability"]) for r in rows) == pytest.approx(1.0, abs=1e-5)


def test_bench_detect_csv(capsys):
    args = ["bench-detect", "--gaps", 2, 10, "--networks", 2, "--group-size", 10, "--mean-degree", 6, "--k", 2,
            "--sweeps", 30, "--burnin", 10, "--runs", 1]
    code, out, _ = run_cli(args, capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["gap"] for r in rows] == ["2.0", "10.0"]
    for r in rows:
        assert r["networks"] == "2"
        assert 0 <= float(r["success_fraction"]) <= 1
        assert float(r["threshold"]) == pytest.approx(2 * 6**0.5, rel=1e-5)
    code, _, _ = run_cli(args[:1] + ["--gaps", 50, "--networks", 1, "--mean-degree", 6, "--k", 2], capsys)
    assert code == 2  # gap too large for the mean degree


def test_schema_version_rejected(tmp_path):
    p = tmp_path / "v2.json"
    p.write_text(json.dumps({"schema_version": 2}))
    with pytest.raises(SchemaVersionError):
        load_result(p)
    with pytest.raises(SchemaVersionError):
        load_result(io.StringIO("{}"))


def test_console_entry_point(triangle):
    proc = subprocess.run(
        [sys.executable, "-m", "sbmcount.cli", "oracle", str(triangle), "--kmax", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["schema_version"] == 1
