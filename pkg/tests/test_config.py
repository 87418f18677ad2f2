import json
import math

import pytest

from chiralcavity.config import ConfigError, bundled_configs, from_mapping, parse_config, to_dict
from chiralcavity.molecule import PROPANEDIOL, Chirality


@pytest.mark.parametrize("name", bundled_configs())
def test_bundled_configs_load(name):
    cfg = parse_config(name)
    assert cfg.drive.eta == pytest.approx(cfg.cavity.kappa * math.sqrt(cfg.drive.lam * cfg.n_cr), rel=1e-14)


def test_bundled_list():
    assert "propanediol_fig2a.cfg" in bundled_configs()


def test_fig2a_values(fig2a):
    assert fig2a.molecule.chirality is Chirality.LEFT
    assert fig2a.sample.sigma_z0 == 1.0
    assert fig2a.detection.phi_lo == pytest.approx(-math.pi / 2)
    assert fig2a.sample.Ybar0 == pytest.approx(-4 * fig2a.cavity.w0)
    assert fig2a.seed == 20221018


def _write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_inconsistent_eta(tmp_path):
    p = _write(tmp_path, "[drive]\nlambda = 0.01\neta = 5 Hz\n")
    with pytest.raises(ConfigError, match="contradicts"):
        parse_config(p)


def test_missing_molecule_uses_preset(tmp_path, caplog):
    p = _write(tmp_path, "[sample]\nN_m = 10\n")
    with caplog.at_level("INFO"):
        cfg = parse_config(p)
    assert cfg.molecule == PROPANEDIOL
    assert "preset" in caplog.text


def test_unknown_key_and_section(tmp_path):
    with pytest.raises(ConfigError, match="unknown key 'bogus'"):
        parse_config(_write(tmp_path, "[cavity]\nbogus = 1\n"))
    with pytest.raises(ConfigError, match=r"unknown section \[extra\]"):
        parse_config(_write(tmp_path, "[extra]\nx = 1\n"))


def test_errors_carry_line_numbers(tmp_path):
    with pytest.raises(ConfigError, match=r"run\.cfg:1:1"):
        parse_config(_write(tmp_path, "N_m = 3\n"))
    with pytest.raises(ConfigError, match=r"run\.cfg:3:1"):
        parse_config(_write(tmp_path, "[sample]\nN_m = 3\nthis line is junk\n"))
    with pytest.raises(ConfigError, match=r"run\.cfg:3:1: duplicate key"):
        parse_config(_write(tmp_path, "[sample]\nN_m = 3\nN_m = 4\n"))


def test_bad_units_and_values(tmp_path):
    with pytest.raises(ConfigError, match=r"\[sample\] v"):
        parse_config(_write(tmp_path, "[sample]\nv = 3 kg\n"))
    with pytest.raises(ConfigError, match="both t0 and tf"):
        parse_config(_write(tmp_path, "[detection]\nt0 = 1 s\n"))
    with pytest.raises(ConfigError, match="tf > t0"):
        parse_config(_write(tmp_path, "[detection]\nt0 = 1 s\ntf = 0.5 s\n"))
    with pytest.raises(ConfigError, match="preset"):
        parse_config(_write(tmp_path, "[molecule]\npreset = water\n"))


def test_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        parse_config("/nonexistent/none.cfg")


def test_json_round_trip(tmp_path):
    data = {"molecule": {"preset": "propanediol", "chirality": "R"}, "sample": {"N_m": 42, "v": "2 m/s"}}
    cfg = parse_config(_write(tmp_path, json.dumps(data), "run.json"))
    assert cfg.sample.N_m == 42 and cfg.sample.v == 2.0
    assert cfg.sample.sigma_z0 == -1.0
    assert cfg == from_mapping(data)
    with pytest.raises(ConfigError, match=r"run\.json:1:"):
        parse_config(_write(tmp_path, "{oops", "run.json"))


def test_digest_and_overrides(fig2a):
    assert fig2a.digest() == parse_config("propanediol_fig2a.cfg").digest()
    other = fig2a.with_(lam=1.0)
    assert other.digest() != fig2a.digest()
    assert other.drive.eta == pytest.approx(fig2a.drive.eta * 10, rel=1e-12)
    assert to_dict(fig2a)["molecule"]["chirality"] == "L"
    assert fig2a.with_(M_Y=0.5).window()[1] - fig2a.with_(M_Y=0.5).window()[0] == pytest.approx(fig2a.tau)
