"""Level data model.

A level is static geometry plus spawn points and diamonds.  Which tracks a
level belongs to is not stored; it falls out of which spawns are present.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Color(enum.Enum):
    """Platform colors: Black blocks both characters, Green only the circle
    collides with, Yellow only the rectangle collides with."""

    Black = "black"
    Green = "green"
    Yellow = "yellow"

    @property
    def code(self) -> float:
        return {"black": 0.0, "green": 1.0, "yellow": 2.0}[self.value]

    def tangible_to_circle(self) -> bool:
        return self is not Color.Yellow

    def tangible_to_rectangle(self) -> bool:
        return self is not Color.Green


class Track(enum.Enum):
    Circle = "circle"
    Rectangle = "rectangle"
    Cooperative = "coop"


@dataclass(frozen=True)
class PlatformSpec:
    """Axis-aligned block anchored at its top-left corner."""

    x: float
    y: float
    w: float
    h: float
    color: Color = Color.Black

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def bottom(self) -> float:
        return self.y + self.h


@dataclass(frozen=True)
class DiamondSpec:
    x: float
    y: float


@dataclass(frozen=True)
class LevelSpec:
    """Complete level description.

    The name is presentation only: it never participates in equality or
    hashing, so the same geometry loaded from two files compares equal.
    """

    width: float
    height: float
    time_limit: float
    circle_spawn: tuple[float, float] | None
    rectangle_spawn: tuple[float, float] | None
    platforms: tuple[PlatformSpec, ...]
    diamonds: tuple[DiamondSpec, ...]
    name: str = field(default="", compare=False)

    @property
    def tracks(self) -> frozenset[Track]:
        if self.circle_spawn is not None and self.rectangle_spawn is not None:
            return frozenset({Track.Cooperative})
        if self.circle_spawn is not None:
            return frozenset({Track.Circle})
        if self.rectangle_spawn is not None:
            return frozenset({Track.Rectangle})
        return frozenset()

    @property
    def has_circle(self) -> bool:
        return self.circle_spawn is not None

    @property
    def has_rectangle(self) -> bool:
        return self.rectangle_spawn is not None
