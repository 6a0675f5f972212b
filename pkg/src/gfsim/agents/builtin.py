"""Registration of the agents that ship with the package."""

from __future__ import annotations

from .contract import Agent, Role
from .registry import register


def _solo_circle(level, cfg, seed) -> Agent:
    from ..control.solo import SoloCircleAgent
    return SoloCircleAgent()


def _solo_rect(level, cfg, seed) -> Agent:
    from ..control.solo import SoloRectAgent
    return SoloRectAgent()


def _coop_circle(level, cfg, seed) -> Agent:
    from ..control.pair import CoopCircleAgent
    return CoopCircleAgent()


def _coop_rect(level, cfg, seed) -> Agent:
    from ..control.pair import CoopRectAgent
    return CoopRectAgent()


def _idle(level, cfg, seed) -> Agent:
    from ..control.solo import IdleAgent
    return IdleAgent()


def register_builtin() -> None:
    register("solo", circle=_solo_circle, rectangle=_solo_rect)
    register("coop", circle=_coop_circle, rectangle=_coop_rect)
    register("idle", circle=_idle, rectangle=_idle)
    # single-role spellings, used where the role is fixed by the flag name
    register("circleSolo", circle=_solo_circle)
    register("rectangleSolo", rectangle=_solo_rect)
