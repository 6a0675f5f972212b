"""Static level checks: geometry that cannot possibly run correctly.

Validation is about well-formedness, not solvability; whether the diamonds
are reachable is the planner's problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..config import Config
from .model import Color, LevelSpec


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def lines(self) -> list[str]:
        out = ["error: " + e for e in self.errors]
        out += ["warning: " + w for w in self.warnings]
        return out


def _point_in_box(px: float, py: float, x: float, y: float, w: float, h: float,
                  margin: float = 0.0) -> bool:
    return (x + margin) < px < (x + w - margin) and (y + margin) < py < (y + h - margin)


def validate_level(level: LevelSpec, cfg: Config) -> ValidationReport:
    rep = ValidationReport()
    err = rep.errors.append
    warn = rep.warnings.append
    phys = cfg.physics

    if level.width <= 0 or level.height <= 0:
        err("arena dimensions must be positive")
        return rep
    if level.time_limit <= 0:
        err("time limit must be positive")
    if level.circle_spawn is None and level.rectangle_spawn is None:
        err("level needs at least one character spawn")
    if not level.diamonds:
        err("level needs at least one diamond")

    r = phys.circle_radius
    if level.circle_spawn is not None:
        x, y = level.circle_spawn
        if not (r <= x <= level.width - r and r <= y <= level.height - r):
            err("circle spawn leaves no clearance to the arena walls")
        for i, p in enumerate(level.platforms):
            if p.color.tangible_to_circle() and _point_in_box(x, y, p.x, p.y, p.w, p.h):
                err("circle spawn center is inside platform %d" % i)

    if level.rectangle_spawn is not None:
        x, y = level.rectangle_spawn
        # spawn shape is the square of the configured area
        half = 0.5 * min(max(phys.rect_area ** 0.5, phys.h_min), phys.h_max)
        if not (half <= x <= level.width - half and half <= y <= level.height - half):
            err("rectangle spawn leaves no clearance to the arena walls")
        for i, p in enumerate(level.platforms):
            if p.color.tangible_to_rectangle() and _point_in_box(x, y, p.x, p.y, p.w, p.h):
                err("rectangle spawn center is inside platform %d" % i)

    for i, p in enumerate(level.platforms):
        if p.w <= 0 or p.h <= 0:
            err("platform %d has non-positive size" % i)
            continue
        if p.x < 0 or p.y < 0 or p.right > level.width or p.bottom > level.height:
            err("platform %d sticks out of the arena" % i)

    slop = phys.pickup_slop
    for i, d in enumerate(level.diamonds):
        if not (0 <= d.x <= level.width and 0 <= d.y <= level.height):
            err("diamond %d is outside the arena" % i)
            continue
        for j, p in enumerate(level.platforms):
            if p.color is Color.Black and _point_in_box(d.x, d.y, p.x, p.y, p.w, p.h,
                                                        margin=slop):
                err("diamond %d is buried in solid platform %d" % (i, j))

    if level.time_limit > 600:
        warn("time limit over ten minutes")
    return rep
