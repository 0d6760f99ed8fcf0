import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from dtnstack.cli import main, parse_run_config
from dtnstack.exceptions import StackParseError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

VACUUM = CONFIGS / "vacuum_certify.json"
BAD_GRID = CONFIGS / "bad_grid.json"
GAIN = CONFIGS / "gain_certify.json"


def run_cli(args):
    return main([str(a) for a in args])


# ----------------------------------------------------------- exit-code contract

def test_bundled_vacuum_config_passes(tmp_path, capsys):
    code = run_cli(["certify", "--config", VACUUM, "--out", tmp_path])
    assert code == 0
    out = capsys.readouterr().out
    assert "[certify] PASS" in out
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["command"] == "certify"
    assert report["results"]["passed"] is True
    assert report["results"]["min_im_eig"] > 0
    assert report["anomalies"] == []


def test_bundled_bad_grid_config_is_usage_error(tmp_path, capsys):
    code = run_cli(["certify", "--config", BAD_GRID, "--out", tmp_path])
    assert code == 1
    err = capsys.readouterr().err
    assert "omega_grid.im_min" in err
    assert not (tmp_path / "report.json").exists()


def test_bundled_gain_config_fails_certification(tmp_path, capsys):
    code = run_cli(["certify", "--config", GAIN, "--out", tmp_path])
    assert code == 2
    assert "[certify] FAIL" in capsys.readouterr().out
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["results"]["passed"] is False
    assert report["results"]["min_im_eig"] < 0


def test_missing_config_file(tmp_path, capsys):
    assert run_cli(["dtn", "--config", tmp_path / "nope.json"]) == 1


def test_invalid_json_config(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert run_cli(["dtn", "--config", p]) == 1


def test_unknown_command_exits_one():
    with pytest.raises(SystemExit) as exc:
        run_cli(["frobnicate", "--config", "x.json"])
    assert exc.value.code == 1


def test_missing_required_key_names_it(tmp_path, capsys):
    doc = json.loads(VACUUM.read_text())
    del doc["omega_grid"]
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    assert run_cli(["certify", "--config", p, "--out", tmp_path]) == 1
    assert "omega_grid" in capsys.readouterr().err


def test_bad_flag_values(tmp_path):
    assert run_cli(["certify", "--config", VACUUM, "--out", tmp_path,
                    "--parallel", "0"]) == 1
    assert run_cli(["energy", "--config", VACUUM, "--out", tmp_path,
                    "--quad-points", "0"]) == 1


# ------------------------------------------------------------- determinism

def test_report_bodies_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(["certify", "--config", VACUUM, "--out", a]) == 0
    assert run_cli(["certify", "--config", VACUUM, "--out", b]) == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()


def test_parallel_sweep_matches_serial(tmp_path):
    a, b = tmp_path / "serial", tmp_path / "par"
    assert run_cli(["sweep", "--config", VACUUM, "--out", a]) == 0
    assert run_cli(["sweep", "--config", VACUUM, "--out", b,
                    "--parallel", "2"]) == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()


def test_sweep_csv_written(tmp_path):
    assert run_cli(["sweep", "--config", VACUUM, "--out", tmp_path]) == 0
    lines = (tmp_path / "sweep.csv").read_text().strip().split("\n")
    assert lines[0].startswith("# omega_re,omega_im,")
    assert len(lines) == 1 + 6  # 3 x 2 grid


# ---------------------------------------------------------- other commands

def test_transfer_command(tmp_path):
    assert run_cli(["transfer", "--config", VACUUM, "--out", tmp_path]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["results"]["flux_min_eig"] > 0
    T = rep["results"]["transfer_matrix"]
    assert len(T) == 4 and len(T[0]) == 4 and len(T[0][0]) == 2


def test_dtn_command(tmp_path):
    assert run_cli(["dtn", "--config", VACUUM, "--out", tmp_path]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    cert = rep["results"]["certificate"]
    assert cert["passive"] is True
    assert cert["flux_positive"] is True
    assert cert["im_min_eig"] > 0


def test_dtn_command_gain_exits_two(tmp_path):
    assert run_cli(["dtn", "--config", GAIN, "--out", tmp_path]) == 2
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["results"]["certificate"]["passive"] is False


def test_energy_command(tmp_path):
    assert run_cli(["energy", "--config", VACUUM, "--out", tmp_path]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    res = rep["results"]
    assert res["passed"] is True
    assert res["relative_gap"] <= 1e-6
    assert res["boundary_flux"] > 0


def test_trajectory_command(tmp_path):
    assert run_cli(["trajectory", "--config", VACUUM, "--out", tmp_path]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    res = rep["results"]
    assert res["passed"] is True
    assert res["roundtrip_deviation"] <= 1e-12
    assert res["min_im_h"] > 0
    assert res["phases"] == ["vacuum"]


def test_console_script_installed(tmp_path):
    exe = shutil.which("dtnstack")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run(
        [exe, "certify", "--config", str(VACUUM), "--out", str(tmp_path)],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "[certify] PASS" in proc.stdout


# -------------------------------------------------------------- config parsing

def test_parse_run_config_defaults():
    doc = json.loads(VACUUM.read_text())
    cfg = parse_run_config(doc, "certify")
    assert cfg.kappa == (0.0, 0.0)
    assert len(cfg.grid) == 6
    assert cfg.z0 == -1.0 and cfg.z1 == 1.0
    assert cfg.psi0.tolist() == [1, 0, 0, 0]


def test_parse_run_config_rejects_outside_z():
    doc = json.loads(VACUUM.read_text())
    doc["z0"] = -5.0
    with pytest.raises(StackParseError) as exc:
        parse_run_config(doc, "certify")
    assert "z0" in str(exc.value)


def test_parse_run_config_real_grid_ok_for_transfer():
    # transfer is not a certification command; a real-axis grid is legal
    doc = json.loads(BAD_GRID.read_text())
    cfg = parse_run_config(doc, "transfer")
    assert cfg.grid[0] == complex(-0.5, 0.0)


def test_parse_run_config_trajectory_block():
    doc = json.loads(VACUUM.read_text())
    doc["trajectory"] = {
        "L0": [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
        "omega": [0.2, 0.8],
        "f": [[1, 0], [0, 0], [0, 0], [0, 1], [0, 0], [0, 0]],
    }
    cfg = parse_run_config(doc, "trajectory")
    assert cfg.traj_omega == 0.2 + 0.8j
    assert cfg.f[3] == 1j
    doc["trajectory"]["omega"] = [0.2, -0.8]
    with pytest.raises(StackParseError):
        parse_run_config(doc, "trajectory")
