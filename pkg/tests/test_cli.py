"""Command line interface: exit codes, text output, canonical JSON reports."""

import json

import pytest

from starcycle.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_graphs_enumerate(capsys):
    code, out, _ = run(capsys, "graphs", "enumerate", "--n", "1", "--m", "3",
                       "--edges", "2")
    assert code == 0
    assert "graphs enumerate: PASS" in out
    assert "count: 6" in out
    assert "1;3;b1,b2" in out


def test_graphs_enumerate_json(capsys):
    code, out, _ = run(capsys, "graphs", "enumerate", "--n", "1", "--m", "2",
                       "--edges", "2", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "graphs enumerate"
    assert report["result"]["count"] == 2
    # canonical serialization: sorted keys, compact separators, one newline
    assert out == json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"


def test_star_apply(capsys):
    code, out, _ = run(capsys, "star", "apply", "--pi", "moyal",
                       "--f", "x1", "--g", "x2")
    assert code == 0
    assert "hbar^0: x1*x2" in out
    assert "hbar^1: 1/2" in out
    assert "hbar^2: 0" in out


def test_star_apply_json_embeds_input_hashes(capsys):
    code, out, _ = run(capsys, "star", "apply", "--pi", "so3",
                       "--f", "x1", "--g", "x2*x3", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["inputs"]["pi"]["path"] == "bundled:so3"
    assert len(report["inputs"]["pi"]["sha256"]) == 64
    assert report["inputs"]["table"]["provenance"] == {"exact": 42, "monte_carlo": 0}


def test_check_cyclic_pass_and_fail(capsys):
    code, out, _ = run(capsys, "check", "cyclic", "--pi", "so3", "--order", "2")
    assert code == 0
    assert "check cyclic: PASS" in out
    code, out, _ = run(capsys, "check", "cyclic", "--pi", "nondiv", "--order", "1")
    assert code == 1
    assert "check cyclic: FAIL" in out
    assert "order 1: residual: (-1/2) D[0,1]*D[0,0]" in out


def test_check_divergence(capsys):
    code, out, _ = run(capsys, "check", "divergence", "--pi", "so3")
    assert code == 0
    code, out, _ = run(capsys, "check", "divergence", "--pi", "nondiv")
    assert code == 1
    assert "x1" in out or "d2" in out


def test_check_jacobi(capsys, tmp_path):
    code, _, _ = run(capsys, "check", "jacobi", "--pi", "so3")
    assert code == 0
    bad = tmp_path / "bad_pi.json"
    bad.write_text(json.dumps({
        "dim": 4, "degree": 1,
        "components": {"1,2": "x1", "3,4": "1", "1,3": "x3"},
    }))
    code, out, _ = run(capsys, "check", "jacobi", "--pi", str(bad))
    assert code == 1
    assert "check jacobi: FAIL" in out


def test_check_closed(capsys):
    code, _, _ = run(capsys, "check", "closed", "--pi", "moyal", "--order", "2")
    assert code == 0
    code, _, _ = run(capsys, "check", "closed", "--pi", "nondiv", "--order", "1")
    assert code == 1


def test_check_assoc(capsys):
    code, out, _ = run(capsys, "check", "assoc", "--pi", "so3", "--order", "2",
                       "--trials", "5", "--seed", "3")
    assert code == 0
    assert "check assoc: PASS" in out


def test_check_alpha(capsys):
    code, out, _ = run(capsys, "check", "alpha", "--pi", "so3",
                       "--alpha", "0,0,1", "--alpha2", "1,0,0",
                       "--samples", "32768", "--seed", "2")
    assert code == 0
    code, out, _ = run(capsys, "check", "alpha", "--pi", "nondiv",
                       "--alpha", "0,0,1", "--alpha2", "1,0,0",
                       "--samples", "32768", "--seed", "2")
    assert code == 1


def test_weights_compute_and_table_round_trip(capsys, tmp_path):
    table_path = tmp_path / "table.json"
    code, out, _ = run(capsys, "weights", "compute", "--n", "1", "--m", "3",
                       "--alpha", "0,0,1", "--samples", "65536", "--seed", "5",
                       "--out-table", str(table_path), "--format", "json")
    assert code == 0
    report = json.loads(out)
    entries = report["result"]["entries"]
    assert len(entries) == 6
    anchor = [e for e in entries if e["graph"] == "1;3;b1,b2"][0]
    assert abs(anchor["value"] - 0.5) <= 3 * anchor["std_error"]
    from starcycle import WeightTable

    loaded = WeightTable.load(str(table_path))
    assert loaded.fingerprint() == report["result"]["table_sha256"]


def test_weights_compute_halfplane_route(capsys):
    code, out, _ = run(capsys, "weights", "compute", "--n", "1", "--m", "2",
                       "--samples", "65536", "--seed", "9", "--format", "json")
    assert code == 0
    entries = json.loads(out)["result"]["entries"]
    assert len(entries) == 2
    vals = {e["graph"]: e["value"] for e in entries}
    assert abs(vals["1;2;b1,b2"] - 0.5) < 0.02


def test_weights_compute_merges_out_table_and_feeds_star(capsys, tmp_path):
    from fractions import Fraction

    path = str(tmp_path / "table.json")
    code, _, _ = run(capsys, "weights", "compute", "--n", "1", "--m", "2",
                     "--samples", "65536", "--seed", "3", "--out-table", path)
    assert code == 0
    code, _, _ = run(capsys, "weights", "compute", "--n", "2", "--m", "2",
                     "--samples", "65536", "--seed", "7", "--out-table", path)
    assert code == 0
    from starcycle import WeightTable

    assert len(WeightTable.load(path).entries) == 38
    code, out, _ = run(capsys, "star", "apply", "--pi", "moyal", "--f", "x1",
                       "--g", "x2", "--order", "2", "--table", path,
                       "--format", "json")
    assert code == 0
    levels = json.loads(out)["result"]["levels"]
    assert levels[0] == "x1*x2"
    assert abs(Fraction(levels[1]) - Fraction(1, 2)) < Fraction(1, 50)


def test_usage_errors_exit_2(capsys):
    # --seed required when sampling
    code, _, err = run(capsys, "weights", "compute", "--n", "1", "--m", "3",
                       "--alpha", "0,0,1", "--samples", "4096")
    assert code == 2 and "seed" in err
    # --alpha forbidden on the half-plane route
    code, _, err = run(capsys, "weights", "compute", "--n", "1", "--m", "2",
                       "--alpha", "0,1", "--samples", "4096", "--seed", "1")
    assert code == 2
    # alpha length must match m
    code, _, err = run(capsys, "weights", "compute", "--n", "1", "--m", "3",
                       "--alpha", "0,1", "--samples", "4096", "--seed", "1")
    assert code == 2
    # unparsable polynomial
    code, _, err = run(capsys, "star", "apply", "--pi", "moyal",
                       "--f", "x1 +", "--g", "x2")
    assert code == 2 and "error:" in err
    code, _, err = run(capsys, "star", "apply", "--pi", "moyal",
                       "--f", "x1 + + x2", "--g", "x2")
    assert code == 2 and "position" in err
    # unknown bivector source
    code, _, err = run(capsys, "check", "divergence", "--pi", "no_such_pi")
    assert code == 2
    # alpha sums must match
    code, _, err = run(capsys, "check", "alpha", "--pi", "so3",
                       "--alpha", "0,0,1", "--alpha2", "2,0,0",
                       "--samples", "4096", "--seed", "1")
    assert code == 2


def test_report_is_deterministic(capsys, monkeypatch):
    argv = ["weights", "compute", "--n", "1", "--m", "3", "--alpha", "0,0,1",
            "--samples", "65536", "--seed", "12", "--format", "json"]
    monkeypatch.setenv("STARCYCLE_THREADS", "1")
    _, out1, _ = run(capsys, *argv)
    monkeypatch.setenv("STARCYCLE_THREADS", "4")
    _, out2, _ = run(capsys, *argv)
    assert out1 == out2
    _, out3, _ = run(capsys, *argv)
    assert out1 == out3


def test_out_file(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, _ = run(capsys, "check", "divergence", "--pi", "moyal",
                       "--format", "json", "--out", str(path))
    assert code == 0
    on_disk = path.read_text()
    assert json.loads(on_disk)["passed"] is True
    assert on_disk.endswith("\n")


def test_custom_pi_and_volume_files(capsys, tmp_path):
    pi_path = tmp_path / "pi.json"
    pi_path.write_text(json.dumps({
        "dim": 2, "degree": 1, "components": {"1,2": "x2"}}))
    vol_path = tmp_path / "vol.json"
    vol_path.write_text(json.dumps({"dim": 2, "log_density": "0"}))
    code, out, _ = run(capsys, "check", "cyclic", "--pi", str(pi_path),
                       "--vol", str(vol_path), "--order", "1")
    assert code == 1     # d(x2 d1^d2) has divergence -d1
    code, out, _ = run(capsys, "check", "jacobi", "--pi", str(pi_path))
    assert code == 0
