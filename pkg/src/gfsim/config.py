"""Simulation and scoring configuration.

Config files are plain ``key = value`` text with a ``gf-config v1`` header
line.  Every key is optional and falls back to the built-in default; unknown
keys are an error so typos do not silently change physics.  The canonical
serialization (sorted keys, ``%.17g`` floats) is what gets hashed into
replay headers, so two configs with equal values always hash alike.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field, fields, replace

FORMAT_HEADER = "gf-config v1"

CONFIG_ENV_VAR = "GF_CONFIG"


class ConfigError(ValueError):
    """Raised for malformed config text or unknown keys."""


def _default_jump_speed() -> float:
    # apex height of four circle radii under default gravity
    return math.sqrt(2.0 * 300.0 * 160.0)


@dataclass(frozen=True)
class PhysicsConfig:
    """Fixed-timestep physics parameters, all in world units and seconds."""

    arena_width: float = 1280.0
    arena_height: float = 800.0
    dt: float = 1.0 / 60.0
    gravity: float = 300.0

    circle_radius: float = 40.0
    roll_accel: float = 400.0
    max_roll_speed: float = 200.0
    jump_speed: float = field(default_factory=_default_jump_speed)
    roll_resist: float = 25.0

    slide_accel: float = 300.0
    max_slide_speed: float = 200.0
    ground_friction: float = 100.0
    morph_rate: float = 80.0
    rect_area: float = 10000.0
    h_min: float = 50.0
    h_max: float = 200.0

    restitution: float = 0.1
    spin_coupling: float = 5.0
    noise_std: float = 0.0
    pickup_slop: float = 5.0

    def rect_width(self, height: float) -> float:
        return self.rect_area / height

    @property
    def jump_apex(self) -> float:
        return self.jump_speed * self.jump_speed / (2.0 * self.gravity)


@dataclass(frozen=True)
class ScoreConfig:
    """Per-level score weights: completion bonus scales with time left."""

    v_completed: float = 100.0
    v_collect: float = 20.0
    t_max: float = 100.0


@dataclass(frozen=True)
class Config:
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    score: ScoreConfig = field(default_factory=ScoreConfig)


def default_config() -> Config:
    return Config()


def _flat_items(cfg: Config) -> list[tuple[str, float]]:
    items = [(f.name, getattr(cfg.physics, f.name)) for f in fields(PhysicsConfig)]
    items += [("score." + f.name, getattr(cfg.score, f.name)) for f in fields(ScoreConfig)]
    return items


def serialize_config(cfg: Config) -> str:
    """Render a config in canonical form (header, sorted keys, %.17g)."""
    lines = [FORMAT_HEADER]
    for key, value in sorted(_flat_items(cfg)):
        lines.append("%s = %.17g" % (key, value))
    return "\n".join(lines) + "\n"


def config_hash(cfg: Config) -> str:
    return hashlib.sha256(serialize_config(cfg).encode("ascii")).hexdigest()


def parse_config(text: str) -> Config:
    """Parse config text into a Config.

    Args:
        text: file content, first non-blank line must be the format header.

    Raises:
        ConfigError: bad header, bad syntax, unknown key, or non-numeric value.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != FORMAT_HEADER:
        raise ConfigError("missing '%s' header" % FORMAT_HEADER)

    phys_names = {f.name for f in fields(PhysicsConfig)}
    score_names = {f.name for f in fields(ScoreConfig)}
    phys: dict[str, float] = {}
    score: dict[str, float] = {}
    for ln in lines[1:]:
        if "=" not in ln:
            raise ConfigError("expected 'key = value', got %r" % ln)
        key, _, raw = ln.partition("=")
        key = key.strip()
        raw = raw.strip()
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError("non-numeric value for %r: %r" % (key, raw)) from None
        if not math.isfinite(value):
            raise ConfigError("non-finite value for %r" % key)
        if key.startswith("score."):
            name = key[len("score."):]
            if name not in score_names:
                raise ConfigError("unknown config key %r" % key)
            score[name] = value
        elif key in phys_names:
            phys[key] = value
        else:
            raise ConfigError("unknown config key %r" % key)

    return Config(physics=PhysicsConfig(**phys), score=ScoreConfig(**score))


def load_config(path: str | None = None) -> Config:
    """Load config from a path, the GF_CONFIG env var, or defaults.

    Explicit path wins over the env var; neither present means defaults.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    if path is None:
        return default_config()
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def save_config(cfg: Config, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_config(cfg))


def with_physics(cfg: Config, **overrides: float) -> Config:
    return replace(cfg, physics=replace(cfg.physics, **overrides))


def with_score(cfg: Config, **overrides: float) -> Config:
    return replace(cfg, score=replace(cfg.score, **overrides))
