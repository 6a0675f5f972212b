"""Navigation graph: surfaces as nodes, verified maneuvers as edges.

Candidate edges come from closed-form ballistics and reach geometry, which
overestimates what the character can do.  Every candidate is then replayed
against the forward model with the same runner the live agent uses; only
maneuvers that actually land get an edge, and the edge cost is the measured
tick count.  A planner on this graph never promises a move the physics
cannot deliver.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from ..agents.contract import Role
from ..config import Config, PhysicsConfig
from ..levels.model import LevelSpec
from ..world.engine import ArrayWorld
from .execute import (
    EdgeHint,
    EdgeKind,
    EdgeRunner,
    place_character,
    run_edge,
)
from .surfaces import Surface, extract_surfaces, min_clearance, surface_at

FLAT_GAP_CIRCLE = 24.0   # rollable without dropping the center much
FLAT_GAP_RECT = 150.0    # bridgeable at full width with grip to spare
JUMP_SPEEDS = (60.0, 120.0, 200.0)
FALL_SPEEDS = (30.0, 80.0, 150.0, 200.0)
EDGE_MARGIN = 6.0        # keep takeoff/landing points this far inside a span


@dataclass(frozen=True)
class NavNode:
    index: int
    surface: Surface


@dataclass(frozen=True)
class NavEdge:
    src: int
    dst: int
    kind: EdgeKind
    hint: EdgeHint
    cost: float   # seconds measured by the verification rollout


class NavGraph:
    def __init__(self, role: Role, phys: PhysicsConfig, nodes: list[NavNode],
                 edges: list[NavEdge]):
        self.role = role
        self.phys = phys
        self.nodes = nodes
        self.edges = edges
        self._adj: list[list[NavEdge]] = [[] for _ in nodes]
        for e in edges:
            self._adj[e.src].append(e)

    def neighbors(self, index: int) -> list[NavEdge]:
        return self._adj[index]

    def node_at(self, x: float, standing_y: float) -> NavNode | None:
        s = surface_at([n.surface for n in self.nodes], x, standing_y)
        return self.nodes[s.index] if s is not None else None

    def __repr__(self) -> str:
        return (f"NavGraph({self.role.value}, {len(self.nodes)} nodes, "
                f"{len(self.edges)} edges)")


def _fit_height(level: LevelSpec, phys: PhysicsConfig, y: float, xl: float,
                xr: float, want: float) -> float:
    """Tallest height up to `want` whose body clears everything over [xl, xr].

    Ducking widens the box, which widens the span the body sweeps, which can
    pull more overhead into play; a couple of fixpoint rounds settle it.
    """
    h = want
    for _ in range(3):
        half = 0.5 * phys.rect_area / max(h, phys.h_min)
        c = min_clearance(level, Role.Rectangle, y, xl - half, xr + half)
        nxt = min(want, c - EDGE_MARGIN)
        if abs(nxt - h) < 1e-6:
            break
        h = nxt
    return h


def rect_travel_height(level: LevelSpec, phys: PhysicsConfig, y: float,
                       xl: float, xr: float) -> float | None:
    """Height the rectangle should hold over [xl, xr]; None if it cannot fit."""
    default = min(math.sqrt(phys.rect_area), phys.h_max)
    h = _fit_height(level, phys, y, xl, xr, default)
    if h < phys.h_min:
        return None
    return h


def _solo_level(level: LevelSpec, role: Role) -> LevelSpec:
    """The level with only one character and no diamonds, for edge trials."""
    spawn = (level.width * 0.5, 60.0)
    if role is Role.Circle:
        return dataclasses.replace(level, diamonds=(), circle_spawn=spawn,
                                   rectangle_spawn=None)
    return dataclasses.replace(level, diamonds=(), rectangle_spawn=spawn,
                               circle_spawn=None)


def _gap_between(a: Surface, b: Surface) -> tuple[float, int] | None:
    """Directed horizontal gap from a to b when they do not overlap."""
    if b.x_left >= a.x_right:
        return b.x_left - a.x_right, 1
    if a.x_left >= b.x_right:
        return a.x_left - b.x_right, -1
    return None


def _landing_time(jump: float, g: float, rise: float) -> float | None:
    # time until the feet come back down to `rise` above takeoff height
    disc = jump * jump - 2.0 * g * rise
    if disc < 0.0:
        return None
    return (jump + math.sqrt(disc)) / g


def _rise_time(jump: float, g: float, rise: float) -> float | None:
    # first moment the arc reaches `rise` above takeoff, still ascending
    disc = jump * jump - 2.0 * g * rise
    if disc < 0.0:
        return None
    return (jump - math.sqrt(disc)) / g


def _circle_candidates(a: Surface, b: Surface, phys: PhysicsConfig,
                       out: list[tuple[EdgeKind, EdgeHint]]) -> None:
    rise = a.y - b.y   # positive when the destination is higher
    apex = phys.jump_apex

    if abs(rise) <= 1.5:
        gap = _gap_between(a, b)
        if gap is not None and gap[0] <= FLAT_GAP_CIRCLE:
            g, d = gap
            target = b.clamp_x(b.mid if b.span < 120 else
                               (b.x_left + 60 if d > 0 else b.x_right - 60),
                               EDGE_MARGIN)
            take = a.x_right if d > 0 else a.x_left
            out.append((EdgeKind.Roll,
                        EdgeHint(EdgeKind.Roll, d, take, d * 120.0, target)))
        return

    if 1.5 < rise <= apex - 6.0:
        # climbing: set the takeoff back far enough that the arc is already
        # above the destination lip when it crosses the face plane
        t_land = _landing_time(phys.jump_speed, phys.gravity, rise)
        t_up = _rise_time(phys.jump_speed, phys.gravity, rise + 10.0)
        if t_land is None or t_up is None:
            return
        d = 1 if b.mid >= a.mid else -1
        r = phys.circle_radius
        plane = b.x_left - r if d > 0 else b.x_right + r
        for speed in JUMP_SPEEDS:
            tx = plane - d * speed * t_up
            txc = a.clamp_x(tx, 2.0)
            if abs(txc - tx) > 1.0:
                continue
            land = tx + d * speed * t_land
            if not (b.x_left + EDGE_MARGIN <= land <= b.x_right - EDGE_MARGIN):
                continue
            out.append((EdgeKind.Jump,
                        EdgeHint(EdgeKind.Jump, d, txc, d * speed,
                                 b.clamp_x(land, EDGE_MARGIN))))
        # leap from the edge itself: covers climbs across a gap, where the
        # set-back takeoff point would hang over the void
        edge = a.x_right if d > 0 else a.x_left
        for speed in JUMP_SPEEDS:
            land = edge + d * speed * t_land
            if not (b.x_left + EDGE_MARGIN <= land <= b.x_right - EDGE_MARGIN):
                continue
            out.append((EdgeKind.Jump,
                        EdgeHint(EdgeKind.Jump, d, a.clamp_x(edge, 2.0),
                                 d * speed, b.clamp_x(land, EDGE_MARGIN))))
        return

    if -420.0 < rise < -1.5:
        # dropping: arcs start at the edge nearest the destination
        t_land = _landing_time(phys.jump_speed, phys.gravity, rise)
        if t_land is not None:
            for speed in JUMP_SPEEDS:
                d = 1 if b.mid >= a.mid else -1
                tx = a.clamp_x(b.x_left - 10.0 if d > 0 else b.x_right + 10.0, 2.0)
                land = tx + d * speed * t_land
                if not (b.x_left + EDGE_MARGIN <= land <= b.x_right - EDGE_MARGIN):
                    continue
                out.append((EdgeKind.Jump,
                            EdgeHint(EdgeKind.Jump, d, tx, d * speed,
                                     b.clamp_x(land, EDGE_MARGIN))))
        _fall_candidates(a, b, phys, None, out)


def _fall_candidates(a: Surface, b: Surface, phys: PhysicsConfig,
                     travel_height: float | None,
                     out: list[tuple[EdgeKind, EdgeHint]]) -> None:
    drop = b.y - a.y
    t = math.sqrt(2.0 * drop / phys.gravity)
    for d in (1, -1):
        edge_x = a.x_right if d > 0 else a.x_left
        for speed in FALL_SPEEDS:
            land = edge_x + d * speed * t
            if not (b.x_left + EDGE_MARGIN <= land <= b.x_right - EDGE_MARGIN):
                continue
            out.append((EdgeKind.Fall,
                        EdgeHint(EdgeKind.Fall, d, edge_x, d * speed,
                                 b.clamp_x(land, EDGE_MARGIN), travel_height)))


def _rect_candidates(a: Surface, b: Surface, level: LevelSpec,
                     phys: PhysicsConfig,
                     out: list[tuple[EdgeKind, EdgeHint]]) -> None:
    rise = a.y - b.y

    if abs(rise) <= 1.5:
        gap = _gap_between(a, b)
        if gap is None or gap[0] > FLAT_GAP_RECT:
            return
        g, d = gap
        take = a.x_right if d > 0 else a.x_left
        target = b.clamp_x(b.mid if b.span < 160 else
                           (b.x_left + 80 if d > 0 else b.x_right - 80),
                           EDGE_MARGIN)
        # tall enough to stand, wide enough to bridge, low enough to fit
        if g > 40.0:
            want = min(phys.rect_area / (g + 60.0), math.sqrt(phys.rect_area))
        else:
            want = math.sqrt(phys.rect_area)
        back = take - d * 70.0  # span includes the staging run-up
        xl, xr = min(back, target), max(back, target)
        h = _fit_height(level, phys, a.y, xl, xr, want)
        if h < phys.h_min:
            return
        kind = EdgeKind.MorphGap if h < math.sqrt(phys.rect_area) - 5.0 else EdgeKind.Slide
        out.append((kind, EdgeHint(kind, d, take, d * 120.0, target, h)))
        return

    if rise < -1.5:
        th = rect_travel_height(level, phys, a.y, a.x_left, a.x_right)
        _fall_candidates(a, b, phys, th, out)


def _verify(aw0: ArrayWorld, role: Role, phys: PhysicsConfig, a: Surface,
            b: Surface, hint: EdgeHint) -> tuple[bool, int]:
    aw = aw0.copy()
    stage = a.clamp_x(hint.takeoff_x - hint.direction * 70.0, 2.0)
    height = hint.travel_height if role is Role.Rectangle else None
    place_character(aw, role, a, stage, 0.0, height)
    dist = abs(hint.takeoff_x - stage) + abs(hint.target_x - hint.takeoff_x) + abs(b.y - a.y)
    budget = 240 + int(0.6 * dist)
    runner = EdgeRunner(role, phys, hint, a, b, budget_ticks=budget)
    return run_edge(aw, role, runner)


def build_graph(level: LevelSpec, cfg: Config, role: Role) -> NavGraph:
    phys = cfg.physics
    surfaces = extract_surfaces(level, phys, role)
    nodes = [NavNode(s.index, s) for s in surfaces]
    aw0 = ArrayWorld(_solo_level(level, role), cfg, seed=0)

    edges: list[NavEdge] = []
    for a in surfaces:
        for b in surfaces:
            if a.index == b.index:
                continue
            cands: list[tuple[EdgeKind, EdgeHint]] = []
            if role is Role.Circle:
                _circle_candidates(a, b, phys, cands)
            else:
                _rect_candidates(a, b, level, phys, cands)
            best: dict[EdgeKind, NavEdge] = {}
            for kind, hint in cands:
                ok, ticks = _verify(aw0, role, phys, a, b, hint)
                if not ok:
                    continue
                cost = ticks * phys.dt
                cur = best.get(kind)
                if cur is None or cost < cur.cost:
                    best[kind] = NavEdge(a.index, b.index, kind, hint, cost)
            edges.extend(best[k] for k in sorted(best, key=lambda k: k.value))

    return NavGraph(role, phys, nodes, edges)
