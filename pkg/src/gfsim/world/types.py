"""World state records and action vocabulary.

These are the values that cross module boundaries: immutable snapshots of
the simulation, plus the discrete per-tick actions each character may take.
The mutable flat-array representation the stepper works on lives in
``gfsim.world.engine``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace


class Action(enum.IntEnum):
    """One action per character per tick; None from an agent means NoAction."""

    NoAction = 0
    Jump = 1
    RollLeft = 2
    RollRight = 3
    SlideLeft = 4
    SlideRight = 5
    MorphUp = 6
    MorphDown = 7


CIRCLE_ACTIONS = frozenset(
    {Action.NoAction, Action.Jump, Action.RollLeft, Action.RollRight}
)
RECTANGLE_ACTIONS = frozenset(
    {Action.NoAction, Action.SlideLeft, Action.SlideRight, Action.MorphUp, Action.MorphDown}
)


class IllegalAction(ValueError):
    """An action was routed to a character that cannot perform it."""


class InconsistentWorld(ValueError):
    """World state disagrees with the level it claims to belong to."""


@dataclass(frozen=True)
class CircleState:
    x: float
    y: float
    vx: float
    vy: float
    angular_velocity: float
    grounded: bool

    def moved(self, **changes: object) -> "CircleState":
        return replace(self, **changes)


@dataclass(frozen=True)
class RectangleState:
    x: float
    y: float
    vx: float
    vy: float
    height: float
    grounded: bool

    def width(self, rect_area: float) -> float:
        return rect_area / self.height

    def moved(self, **changes: object) -> "RectangleState":
        return replace(self, **changes)


@dataclass(frozen=True)
class DiamondState:
    x: float
    y: float
    collected: bool


@dataclass(frozen=True)
class WorldState:
    """Immutable full-simulation snapshot at one tick boundary."""

    tick: int
    circle: CircleState | None
    rectangle: RectangleState | None
    diamonds: tuple[DiamondState, ...]

    @property
    def uncollected(self) -> int:
        return sum(1 for d in self.diamonds if not d.collected)

    @property
    def all_collected(self) -> bool:
        return self.uncollected == 0

    def elapsed(self, dt: float) -> float:
        return self.tick * dt
