"""Stand-able surface extraction.

A surface is a maximal horizontal interval a character can stand on: the
floor plus the top edge of every platform tangible to that character,
merged where flush, then split wherever an overhead platform leaves less
headroom than the character needs (full diameter for the circle, the
minimum morph height for the rectangle, plus a skin).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..config import PhysicsConfig
from ..levels.model import Color, LevelSpec
from ..agents.contract import Role

HEADROOM_SKIN = 4.0
MIN_STAND = {Role.Circle: 12.0, Role.Rectangle: 24.0}


@dataclass(frozen=True)
class Surface:
    index: int
    y: float        # standing height (top edge)
    x_left: float
    x_right: float
    is_floor: bool = False

    @property
    def span(self) -> float:
        return self.x_right - self.x_left

    @property
    def mid(self) -> float:
        return 0.5 * (self.x_left + self.x_right)

    def clamp_x(self, x: float, margin: float = 0.0) -> float:
        return min(max(x, self.x_left + margin), self.x_right - margin)

    def contains_x(self, x: float, slack: float = 2.0) -> bool:
        return self.x_left - slack <= x <= self.x_right + slack


def _tangible(p, role: Role) -> bool:
    if role is Role.Circle:
        return p.color.tangible_to_circle()
    return p.color.tangible_to_rectangle()


def required_headroom(phys: PhysicsConfig, role: Role) -> float:
    if role is Role.Circle:
        return 2.0 * phys.circle_radius + HEADROOM_SKIN
    return phys.h_min + HEADROOM_SKIN


def _blocked_margin(phys: PhysicsConfig, role: Role) -> float:
    # how close a standing center may come to an overhead blocker
    if role is Role.Circle:
        return phys.circle_radius
    return 0.5 * phys.rect_area / phys.h_min


def _merge_intervals(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    merged: list[list[float]] = []
    for a, b in sorted(intervals):
        if merged and a <= merged[-1][1] + 1.0:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]


def _split_pieces(pieces: list[tuple[float, float]],
                  cuts: list[tuple[float, float]]) -> list[tuple[float, float]]:
    # a constricted strip stays standable; carving it into its own piece
    # makes the edges in and out carry the duck height
    out: list[tuple[float, float]] = []
    for a, b in pieces:
        marks = {a, b}
        for cl, cr in cuts:
            for m in (cl, cr):
                if a + 1.0 < m < b - 1.0:
                    marks.add(m)
        ms = sorted(marks)
        out.extend((u, v) for u, v in zip(ms, ms[1:]))
    return out


def extract_surfaces(level: LevelSpec, phys: PhysicsConfig, role: Role) -> list[Surface]:
    tangible = [p for p in level.platforms if _tangible(p, role)]

    # candidate tops grouped by height, floor included
    by_y: dict[float, list[tuple[float, float]]] = {}
    by_y.setdefault(level.height, []).append((0.0, level.width))
    for p in tangible:
        by_y.setdefault(p.y, []).append((p.x, p.right))

    headroom = required_headroom(phys, role)
    margin = _blocked_margin(phys, role)
    min_len = MIN_STAND[role]
    full_h = min(math.sqrt(phys.rect_area), phys.h_max)

    raw: list[tuple[float, float, float, bool]] = []  # y, xl, xr, is_floor
    for y, intervals in by_y.items():
        for xl, xr in _merge_intervals(intervals):
            # overhead blockers: any tangible platform whose underside hangs
            # into the standing headroom above this strip
            blocks = []
            for q in tangible:
                # anything intruding into [y - headroom, y) overhead blocks
                if q.bottom <= y - headroom or q.y >= y:
                    continue
                if q.right <= xl or q.x >= xr:
                    continue
                blocks.append((q.x - margin, q.right + margin))
            pieces = [(xl, xr)]
            for bl, br in _merge_intervals(blocks):
                nxt = []
                for a, b in pieces:
                    if br <= a or bl >= b:
                        nxt.append((a, b))
                        continue
                    if bl > a:
                        nxt.append((a, bl))
                    if br < b:
                        nxt.append((br, b))
                pieces = nxt
            if role is Role.Rectangle:
                # overhead that fits a ducked box but not a full one: keep the
                # strip, but as its own surface so transit morphs down for it
                soft = []
                for q in tangible:
                    if q.y >= y or q.bottom <= y - full_h - HEADROOM_SKIN:
                        continue
                    if q.bottom > y - headroom:
                        continue  # impassable, already cut away
                    if q.right <= xl or q.x >= xr:
                        continue
                    duck = max((y - q.bottom) - HEADROOM_SKIN, phys.h_min)
                    half = 0.5 * phys.rect_area / duck
                    soft.append((q.x - half, q.right + half))
                if soft:
                    pieces = _split_pieces(pieces, _merge_intervals(soft))
            for a, b in pieces:
                if b - a >= min_len:
                    raw.append((y, a, b, y == level.height))

    raw.sort(key=lambda t: (t[0], t[1]))
    return [Surface(index=i, y=y, x_left=a, x_right=b, is_floor=fl)
            for i, (y, a, b, fl) in enumerate(raw)]


def surface_at(surfaces: list[Surface], x: float, standing_y: float,
               y_tol: float = 3.0, x_slack: float = 2.0) -> Surface | None:
    """Which surface a character standing at (x, standing_y) is on."""
    best = None
    for s in surfaces:
        if abs(s.y - standing_y) <= y_tol and s.contains_x(x, x_slack):
            if best is None or abs(s.y - standing_y) < abs(best.y - standing_y):
                best = s
    return best


def surface_below(surfaces: list[Surface], x: float, standing_y: float,
                  x_slack: float = 2.0) -> Surface | None:
    """The first surface a character at (x, standing_y) would settle onto."""
    best = None
    for s in surfaces:
        if s.y >= standing_y - 1.0 and s.contains_x(x, x_slack):
            if best is None or s.y < best.y:
                best = s
    return best


def min_clearance(level: LevelSpec, role: Role, y: float, xl: float, xr: float) -> float:
    """Smallest headroom above the strip [xl, xr] at standing height y."""
    clear = y  # the ceiling of the arena caps it anyway
    for q in level.platforms:
        if not _tangible(q, role):
            continue
        if q.y >= y or q.right <= xl or q.x >= xr:
            continue
        clear = min(clear, y - q.bottom)  # negative when q straddles the strip
    return clear
