import logging
from importlib import resources

import pytest

from bitebullet import ValidationError
from bitebullet.config import load_config, parse_config, with_sim


def test_defaults_reproduce_reference_set():
    cfg = load_config(None)
    d = cfg.dynamics
    assert d.alpha1 == pytest.approx(0.03708657, abs=5e-9)
    assert d.alpha2 == pytest.approx(0.02758027, abs=5e-9)
    assert d.sigma1 == pytest.approx(0.19012608) and d.r == 0.05
    assert cfg.cost.K == 60.0 and cfg.cost.q == 0.0
    assert cfg.temperature is not None


def test_shipped_ini_matches_builtin_defaults():
    text = resources.files("bitebullet").joinpath("data/default.ini").read_text()
    assert parse_config(text) == load_config(None)


def test_damage_section_and_precedence(caplog):
    text = """
[temperature]
gamma = 2.0
[damage]
alpha1 = 0.03
alpha2 = 0.02
sigma1 = 0.2
sigma2 = 0.1
[economy]
r = 0.06
[cost]
K = 10
q = 0.01
"""
    with caplog.at_level(logging.WARNING):
        cfg = parse_config(text)
    assert "using [damage]" in caplog.text
    assert cfg.temperature is None
    assert (cfg.dynamics.alpha1, cfg.dynamics.sigma2, cfg.dynamics.r) == (0.03, 0.1, 0.06)
    assert cfg.cost.K == 10.0 and cfg.cost.q == 0.01


def test_keys_are_case_insensitive():
    cfg = parse_config("[cost]\nk = 5\nQ = 0.02\n[simulation]\nPATHS = 10\nbridge_correction = no\n")
    assert cfg.cost.K == 5.0 and cfg.cost.q == 0.02
    assert cfg.sim.paths == 10 and cfg.sim.bridge_correction is False


@pytest.mark.parametrize("text, match", [
    ("[weather]\nx = 1\n", "unknown config section"),
    ("[cost]\nprice = 1\n", "unknown key"),
    ("[economy]\nrate = 1\n", "unknown key"),
    ("[cost]\nK = sixty\n", "K"),
    ("[economy]\nr = 0.03\n", "r > alpha1"),
    ("not an ini", "malformed"),
    ("[simulation]\nquantile_levels = 0.9, 0.1\n", "quantile"),
])
def test_invalid_configs(text, match):
    with pytest.raises(ValidationError, match=match):
        parse_config(text)


def test_ini_round_trip():
    cfg = with_sim(load_config(None), paths=123, seed=9, quantile_levels=(0.2, 0.7))
    assert parse_config(cfg.to_ini()) == cfg
    dmg = parse_config("[damage]\nalpha1 = 0.03\nalpha2 = 0.01\nsigma1 = 0.1\nsigma2 = 0.0\n")
    assert parse_config(dmg.to_ini()) == dmg


def test_with_sim_ignores_unset():
    cfg = load_config(None)
    assert with_sim(cfg, paths=None) is cfg
    assert with_sim(cfg, dt=0.2).sim.dt == 0.2
