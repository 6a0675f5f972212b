import math

import pytest

from gfsim.config import (
    Config,
    ConfigError,
    config_hash,
    default_config,
    load_config,
    parse_config,
    save_config,
    serialize_config,
    with_physics,
)


def test_defaults():
    cfg = default_config()
    p = cfg.physics
    assert p.dt == pytest.approx(1.0 / 60.0)
    assert p.gravity == 300.0
    assert p.circle_radius == 40.0
    # jump apex is four circle radii
    assert p.jump_apex == pytest.approx(160.0)
    assert p.jump_speed == pytest.approx(math.sqrt(2 * 300.0 * 160.0))
    assert p.rect_width(p.h_min) == pytest.approx(200.0)
    assert p.rect_width(p.h_max) == pytest.approx(50.0)
    assert cfg.score.v_completed == 100.0
    assert cfg.score.v_collect == 20.0
    assert cfg.score.t_max == 100.0


def test_round_trip():
    cfg = with_physics(default_config(), gravity=350.0, noise_std=0.25)
    text = serialize_config(cfg)
    back = parse_config(text)
    assert back == cfg
    assert config_hash(back) == config_hash(cfg)


def test_hash_ignores_formatting():
    base = serialize_config(default_config())
    noisy = base.replace("\n", "\n\n# padding\n", 1)
    assert parse_config(noisy) == default_config()


def test_partial_file_fills_defaults():
    cfg = parse_config("gf-config v1\ngravity = 250\nscore.t_max = 60\n")
    assert cfg.physics.gravity == 250.0
    assert cfg.physics.dt == pytest.approx(1.0 / 60.0)
    assert cfg.score.t_max == 60.0
    assert cfg.score.v_collect == 20.0


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        parse_config("gf-config v1\ngravvity = 250\n")
    with pytest.raises(ConfigError):
        parse_config("gf-config v1\nscore.bonus = 1\n")


def test_bad_header_and_values():
    with pytest.raises(ConfigError):
        parse_config("gravity = 250\n")
    with pytest.raises(ConfigError):
        parse_config("gf-config v1\ngravity = fast\n")
    with pytest.raises(ConfigError):
        parse_config("gf-config v1\ngravity = inf\n")


def test_load_from_path_and_env(tmp_path, monkeypatch):
    cfg = with_physics(default_config(), dt=1.0 / 120.0)
    path = tmp_path / "fast.cfg"
    save_config(cfg, str(path))
    assert load_config(str(path)) == cfg

    monkeypatch.setenv("GF_CONFIG", str(path))
    assert load_config() == cfg
    monkeypatch.delenv("GF_CONFIG")
    assert load_config() == default_config()


def test_different_values_different_hash():
    a = default_config()
    b = with_physics(a, gravity=301.0)
    assert config_hash(a) != config_hash(b)
    assert isinstance(a, Config)
