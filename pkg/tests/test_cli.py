import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from qgs.cli import main
from qgs.spectrum import report_from_json, report_to_json

GRAPHS = Path(__file__).resolve().parents[1] / "demos" / "graphs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_path3(capsys):
    code, out, _ = run(capsys, "spectrum", GRAPHS / "path3.graph", "--zmax", 60)
    assert code == 0
    data = json.loads(out)
    zs = sorted(p["z"] for p in data["points"])
    expected = [(k * math.pi / 2) ** 2 for k in range(7) if (k * math.pi / 2) ** 2 <= 60]
    assert zs == pytest.approx(expected, abs=1e-8)


def test_bands_kronig_penney_all_gaps_open(capsys):
    code, out, _ = run(capsys, "bands", GRAPHS / "kp.graph", "--alpha", 2, "--zmax", 100)
    assert code == 0
    data = json.loads(out)
    assert data["closed"] == []
    assert len(data["gaps"]) == len(data["bands"]) - 1 == 3
    assert all(g["right"] > g["left"] for g in data["gaps"])


def test_validate_path3(capsys):
    code, out, _ = run(capsys, "validate", GRAPHS / "path3.graph", "--N", 500, "--zmax", 60)
    assert code == 0
    assert json.loads(out)["ok"]


def test_validate_mismatch_exit_code(capsys):
    # a tolerance below the discretisation error leaves theory points unmatched
    code, _, err = run(capsys, "validate", GRAPHS / "path3.graph", "--N", 20, "--zmax", 60, "--tol", 1e-9)
    assert code == 1
    assert "mismatch" in err


def test_discriminant_csv(capsys):
    code, out, _ = run(capsys, "discriminant", GRAPHS / "kp.graph", "--zmax", 10, "--points", 3)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "z,eta"
    assert len(lines) == 4
    z, eta = map(float, lines[1].split(","))
    assert z == -1.0
    assert eta == pytest.approx(2 * math.cosh(1) + 2 * math.sinh(1), rel=1e-11)


def test_dirichlet_and_discrete_spec(capsys):
    code, out, _ = run(capsys, "dirichlet", GRAPHS / "edge.graph", "--zmax", 50, "--format", "csv")
    assert code == 0
    assert out.splitlines()[1:] == ["0,9.86960440109", "1,39.4784176044"]
    code, out, _ = run(capsys, "discrete-spec", GRAPHS / "path3.graph")
    data = json.loads(out)
    assert [e["mult"] for e in data["eigenvalues"]] == [1, 1, 1]


def test_lattice(capsys):
    code, out, _ = run(capsys, "lattice", GRAPHS / "kp.graph", "--n", 2)
    assert code == 0
    data = json.loads(out)
    assert data["mode"] == "lattice-2"
    assert [e["status"] for e in data["sigma0"]] == ["Present"] * 3
    code, _, err = run(capsys, "lattice", GRAPHS / "kp.graph")
    assert code == 2 and "n" in err


def test_bad_input_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text('{"vertices": ["a"], "edges": [{"id": "e1", "from": "a", "to": "b"}]}')
    code, _, err = run(capsys, "spectrum", bad)
    assert code == 2
    assert "edges" in err
    bad.write_text("{")
    assert run(capsys, "spectrum", bad)[0] == 2
    assert run(capsys, "spectrum", tmp_path / "missing.graph")[0] == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", str(GRAPHS / "edge.graph"), "--zmax", "-3"])
    assert exc.value.code == 2


def test_numerical_failure_exit_code(monkeypatch, capsys):
    from qgs import cli
    from qgs.errors import ScanResolutionExceeded

    def boom(*a, **k):
        raise ScanResolutionExceeded("cannot separate")

    monkeypatch.setattr(cli, "quantum_spectrum", boom)
    code, _, err = run(capsys, "spectrum", GRAPHS / "edge.graph")
    assert code == 3 and "ScanResolutionExceeded" in err


def test_bad_log_level(monkeypatch, capsys):
    monkeypatch.setenv("QGS_LOG", "loud")
    code, _, err = run(capsys, "dirichlet", GRAPHS / "edge.graph")
    assert code == 2 and "QGS_LOG" in err


def test_output_file_and_roundtrip(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert run(capsys, "spectrum", GRAPHS / "step.graph", "--zmax", 80, "--out", out)[0] == 0
    text = out.read_text()
    assert report_to_json(report_from_json(text)) == text


def test_deterministic_output_across_processes(tmp_path):
    outs = []
    for _ in range(2):
        res = subprocess.run(
            [sys.executable, "-m", "qgs", "spectrum", str(GRAPHS / "step.graph"), "--format", "csv"],
            capture_output=True, check=True,
        )
        outs.append(res.stdout)
    assert outs[0] == outs[1]
    assert outs[0].startswith(b"kind,z,z_right,mult,lambda,band,status\n")


def test_run_config_checks_required_fields():
    from qgs.cli import RunConfig
    from qgs.errors import InputError

    with pytest.raises(InputError, match="n"):
        RunConfig("lattice", "x.graph")
    with pytest.raises(InputError, match="zmax"):
        RunConfig("spectrum", "x.graph", zmax=0.0)
    with pytest.raises(InputError, match="command"):
        RunConfig("plot", "x.graph")
    assert RunConfig("discriminant", "x.graph").format == "csv"
    assert RunConfig("bands", "x.graph").format == "json"


def test_run_directly(tmp_path):
    from qgs.cli import RunConfig, run

    out = tmp_path / "mu.csv"
    assert run(RunConfig("dirichlet", str(GRAPHS / "edge.graph"), zmax=20.0, format="csv", out=str(out))) == 0
    assert out.read_text() == "k,mu\n0,9.86960440109\n"
