"""Headless cooperative physics-puzzle platformer.

A deterministic fixed-timestep simulator for a two-character puzzle game
(a jumping, rolling circle and a sliding, shape-shifting rectangle), plus
the planning agents that play it, a batch evaluation harness, and a
websocket session service for live play.
"""

__version__ = "0.1.0"

from .config import Config, PhysicsConfig, ScoreConfig, default_config, load_config

__all__ = ["Config", "PhysicsConfig", "ScoreConfig", "default_config", "load_config",
           "__version__"]
