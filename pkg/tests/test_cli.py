import json
from pathlib import Path

import pytest

from chiralcavity import cli

GOLDEN = Path(__file__).parent / "golden"


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_help_matches_golden(capsys, monkeypatch):
    monkeypatch.setenv("COLUMNS", "80")
    with pytest.raises(SystemExit) as info:
        cli.main(["--help"])
    assert info.value.code == 0
    assert capsys.readouterr().out == (GOLDEN / "help.txt").read_text()


def test_design_cavity(tmp_path, capsys):
    code, out, _ = run(["design-cavity", "--q", "0", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert "d = 3.460971 mm" in out
    lines = (tmp_path / "cavity_q0.csv").read_text().splitlines()
    assert len(lines) == 2 and lines[0].startswith("q,")


def test_out_directory_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert run(["design-cavity", "--q", "1"], capsys)[0] == 0
    assert (tmp_path / "env" / "cavity_q1.csv").exists()


def test_config_error_is_json_with_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[cavity]\nbogus = 1\n")
    code, out, err = run(["detect", str(bad), "--out", str(tmp_path)], capsys)
    assert code == 2 and out == ""
    msg = json.loads(err)
    assert msg["error"] == "config" and "bogus" in msg["message"]


def test_runtime_error_exit_1(tmp_path, capsys):
    code, _, err = run(["esst", "--phi", "12 kg"], capsys)
    assert code == 1
    assert "message" in json.loads(err)


def test_esst_report(capsys):
    code, out, _ = run(["esst"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["L"]["sigma_z0"] == 1.0 and rep["R"]["sigma_z0"] == -1.0
    assert rep["L"]["populations"][1] == pytest.approx(0.0, abs=1e-12)


def test_detect_and_simulate(tmp_path, capsys):
    code, out, _ = run(["detect", "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["snr"] == pytest.approx(5.430, rel=1e-3)
    assert json.loads((tmp_path / "detect.json").read_text()) == rep
    code, out, _ = run(["simulate", "--out", str(tmp_path), "--tolerance", "1e-8"], capsys)
    assert code == 0
    assert (tmp_path / "trajectory_L.csv").exists() and (tmp_path / "trajectory_R.csv").exists()


def test_sweep_snr_nm(tmp_path, capsys):
    code, out, _ = run(["sweep", "--kind", "snr-nm", "--nm", "100,200", "--jobs", "1", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert list(tmp_path.glob("*.csv"))


def test_montecarlo_seed(tmp_path, capsys):
    argv = ["montecarlo", "--shots", "1000", "--seed", "5", "--out", str(tmp_path)]
    first = json.loads(run(argv, capsys)[1])
    second = json.loads(run(argv, capsys)[1])
    assert first == second and first["seed"] == 5
