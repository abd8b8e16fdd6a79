import json
import os
import subprocess
import sys

import pytest

from crjets.cli import main
from crjets.documents import dumps, fixture_path, load


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_pullback_heisenberg(capsys, tmp_path):
    out_file = tmp_path / "germ.json"
    code, out, _ = run(capsys, "pullback", "--in", str(fixture_path("heisenberg")), "--out", str(out_file))
    assert code == 0
    assert out.strip() == "x1^2 + y1^2"
    written = load(out_file)
    assert written.require_germ().to_text() == "x1^2 + y1^2"
    assert dumps(written) == out_file.read_text()


def test_pullback_json(capsys):
    code, out, _ = run(capsys, "pullback", "--in", str(fixture_path("catalan")), "--json")
    assert code == 0
    data = json.loads(out)
    assert data["germ"] == ["x1^2 + x1^4 + 2*x1^6 + 5*x1^8 + 14*x1^10 + 42*x1^12"]
    assert data["iterations_used"] <= 12


def test_check_distinguishes_tampered(capsys):
    assert run(capsys, "check", "--in", str(fixture_path("heisenberg")))[:2] == (0, "true\n")
    assert run(capsys, "check", "--in", str(fixture_path("tampered")))[:2] == (1, "false\n")


def test_dims_table(capsys):
    code, out, _ = run(capsys, "dims", "--m", "1", "--d", "1", "--mprime", "1", "--nu", "2", "--k", "10")
    assert code == 0
    for value in ("282", "256", "10"):
        assert value in out


def test_dims_json(capsys):
    code, out, _ = run(capsys, "dims", "--m", "1", "--d", "1", "--mprime", "1", "--nu", "2", "--k", "10", "--json")
    data = json.loads(out)
    assert (data["dim_R_k"], data["dim_H_k"], data["dim_A"]) == (282, 256, 10)


def test_crossover(capsys):
    code, out, _ = run(capsys, "crossover", "--m", "1", "--d", "1", "--mprime", "1", "--nu", "2", "--kmax", "50")
    assert code == 0 and out.startswith("k* = 10")
    code, out, _ = run(capsys, "crossover", "--m", "1", "--d", "1", "--mprime", "1", "--nu", "2", "--kmax", "5")
    assert code == 0 and "no crossover" in out


def test_validation_error_exit_code(capsys):
    code, _, err = run(capsys, "crossover", "--m", "0", "--d", "1", "--mprime", "1", "--nu", "2", "--kmax", "50")
    assert code == 2
    assert json.loads(err)["kind"] == "validation"


def test_io_error_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "check", "--in", str(tmp_path / "missing.json"))
    assert code == 4
    assert json.loads(err)["kind"] == "io"


def test_bad_document_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": "1"}')
    code, _, err = run(capsys, "pullback", "--in", str(bad))
    assert code == 2
    assert json.loads(err)["error"] == "DocumentError"


def test_norm(capsys):
    assert run(capsys, "norm", "--in", str(fixture_path("cubic")), "--t", "1/2")[:2] == (0, "1\n")
    assert run(capsys, "norm", "--in", str(fixture_path("heisenberg")), "--t", "0")[0] == 2


def test_keyobs_and_rank(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"signature": {"m": 1, "d": 1, "mprime": 1, "nu": 2, "k": 3}, "seed": 1, "trials": 3}))
    code, out, _ = run(capsys, "keyobs", "--config", str(cfg))
    assert code == 0 and "failures=0" in out
    code, out, _ = run(capsys, "rank", "--config", str(cfg), "--json")
    reports = json.loads(out)
    assert code == 0 and len(reports) == 3
    assert all(r["numerical_rank"] <= r["jacobian_rows"] for r in reports)


def test_keyobs_plan_config(capsys, tmp_path):
    cfg = tmp_path / "plan.json"
    cfg.write_text(json.dumps({"plan": {"total": 32}, "seed": 4, "density": 0.3}))
    code, out, _ = run(capsys, "keyobs", "--config", str(cfg), "--json")
    data = json.loads(out)
    assert code == 0 and data["trials"] == 32 and data["failures"] == 0


def test_computation_error_exit_code(capsys, monkeypatch, tmp_path):
    from crjets import cli, errors

    def boom(*args, **kwargs):
        raise errors.NoStabilization("forced")

    monkeypatch.setattr(cli, "pullback", boom)
    code, _, err = run(capsys, "pullback", "--in", str(fixture_path("heisenberg")))
    assert code == 3 and json.loads(err)["kind"] == "computation"


def test_module_entry_point_is_locale_independent():
    env = dict(os.environ, LC_ALL="de_DE.UTF-8", LANG="de_DE.UTF-8")
    outputs = []
    for extra in ({}, env):
        proc = subprocess.run(
            [sys.executable, "-m", "crjets", "norm", "--in", str(fixture_path("scaled")), "--t", "3/2"],
            capture_output=True,
            text=True,
            env=extra or None,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1] == "9/4\n"
