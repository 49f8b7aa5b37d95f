"""Experiment config parsing, overrides, and the external-automaton slot."""

import pytest

from conftest import asset_path, asset_text
from ltlq.config import load_config
from ltlq.errors import ParseError, ValidationError


def test_load_shipped_configs():
    cfg = load_config(asset_path("two_state.cfg"))
    assert cfg.scheme.gamma == 0.99999
    assert cfg.scheme.gamma_b == 0.99
    assert cfg.learn.episodes == 10_000
    assert cfg.learn.horizon == 30
    assert cfg.learn.start == "initial"
    assert cfg.formula == "F G a | F G b"
    assert cfg.replications == 1
    product = cfg.load_product()
    assert product.n_states == 8

    cfg = load_config(asset_path("safe_absorb.cfg"))
    assert cfg.learn.snapshots == (1_000, 10_000, 100_000)
    assert cfg.learn.start == "random"
    assert cfg.load_product().n_states == 80


def test_overrides():
    cfg = load_config(asset_path("safe_absorb.cfg"), seed=9, episodes=5000, replications=3)
    assert cfg.learn.seed == 9
    assert cfg.learn.episodes == 5000
    assert cfg.replications == 3
    # snapshots beyond the reduced budget are dropped
    assert cfg.learn.snapshots == (1_000,)


def test_external_ldba_slot():
    # the patrol config ships without an automaton; loading the model works,
    # building the product points at the external slot
    cfg = load_config(asset_path("nursery.cfg"))
    assert cfg.ldba_path is None
    assert cfg.load_mdp().n_states == 20
    with pytest.raises(ValidationError, match="externally produced"):
        cfg.load_product()


def test_missing_files(tmp_path):
    with pytest.raises(ValidationError, match="not found"):
        load_config(tmp_path / "nope.cfg")
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("[model]\nmdp = missing.grid\n")
    with pytest.raises(ValidationError, match="not found"):
        load_config(cfg_file)


def test_malformed_model_reported_with_config_path(tmp_path):
    bad = tmp_path / "bad.ldba"
    bad.write_text(asset_text("fg_a_or_fg_b.ldba") + "1 -> 2 : eps\n")
    mdp = tmp_path / "m.mdp"
    mdp.write_text(asset_text("two_state.mdp"))
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("[model]\nmdp = m.mdp\nldba = bad.ldba\n")
    with pytest.raises(ValidationError, match="accepting component"):
        load_config(cfg_file)


def test_missing_model_section(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("[learn]\nepisodes = 10\n")
    with pytest.raises(ParseError, match="model"):
        load_config(cfg_file)


def test_schedule_in_config(tmp_path):
    mdp = tmp_path / "m.mdp"
    mdp.write_text(asset_text("two_state.mdp"))
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text(
        "[model]\nmdp = m.mdp\n[scheme]\ngamma = 0.9999\ngamma_b_schedule = power:0.5\n"
    )
    cfg = load_config(cfg_file)
    assert cfg.scheme.gamma_b == pytest.approx(0.99)
