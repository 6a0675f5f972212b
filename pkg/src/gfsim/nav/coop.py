"""Diamond assignment: who can collect what, and how.

Solo pickups are proposed geometrically and then proven by rollout, like
nav edges.  Diamonds nobody can reach alone are checked against the one
cooperative pattern the characters support: the rectangle parks under the
diamond, the circle rides its top, and the stack morphs tall (plus a jump
off the top for the really high ones).  Tight passages and color-filtered
routes do not need their own modes; they fall out as single-role solo
reachability.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from ..agents.contract import Role
from ..config import Config, PhysicsConfig
from ..levels.model import LevelSpec
from ..world.engine import ArrayWorld
from .execute import CollectHint, CollectRunner, place_character, run_collect
from .graph import NavGraph, rect_travel_height
from .search import CollectTask, dijkstra
from .surfaces import Surface, surface_below

MODE_EITHER = "either"
MODE_CIRCLE = "circle"
MODE_RECT = "rectangle"
MODE_COOP = "coop_height"
MODE_UNREACHABLE = "unreachable"

RIDE_SIDE_PAD = 8.0      # circle waits this far clear of the carrier's side
MOUNT_RISE_MAX = 150.0   # circle can jump this high onto the carrier


@dataclass(frozen=True)
class CoopPlanItem:
    """One stack-and-lift pickup: carrier parks, rider boards, both rise."""

    diamond: int
    carrier_node: int     # rectangle-graph node to park on
    park_x: float
    lift_height: float    # carrier height once the rider is aboard
    jump_from_top: bool   # rider jumps off the raised top for the catch
    mount_node: int       # circle-graph node the rider boards from
    mount_x: float
    est_cost: float


@dataclass(frozen=True)
class DiamondAssignment:
    diamond: int
    mode: str
    circle: CollectTask | None = None
    rect: CollectTask | None = None
    coop: CoopPlanItem | None = None


def _reach(phys: PhysicsConfig) -> float:
    return phys.circle_radius + phys.pickup_slop


def _solo_with_diamonds(level: LevelSpec, role: Role) -> LevelSpec:
    spawn = (level.width * 0.5, 60.0)
    if role is Role.Circle:
        return dataclasses.replace(level, circle_spawn=spawn, rectangle_spawn=None)
    return dataclasses.replace(level, rectangle_spawn=spawn, circle_spawn=None)


def spawn_node(graph: NavGraph, level: LevelSpec, role: Role) -> int | None:
    """Node the character settles on at level start."""
    phys = graph.phys
    if role is Role.Circle:
        spawn = level.circle_spawn
        half = phys.circle_radius
    else:
        spawn = level.rectangle_spawn
        h0 = min(max(math.sqrt(phys.rect_area), phys.h_min), phys.h_max)
        half = 0.5 * h0
    if spawn is None:
        return None
    x, y = spawn
    surfaces = [n.surface for n in graph.nodes]
    s = surface_below(surfaces, x, y + half)
    return s.index if s is not None else None


def _circle_pickup_hints(d, s: Surface, phys: PhysicsConfig) -> list[CollectHint]:
    reach = _reach(phys)
    r = phys.circle_radius
    cy = s.y - r                       # standing center height
    x0 = s.clamp_x(d.x, 2.0)
    hints: list[CollectHint] = []
    if math.hypot(d.x - x0, d.y - cy) <= reach - 2.0:
        hints.append(CollectHint((d.x, d.y), x0))
        return hints
    rise = cy - d.y
    if 0.0 < rise <= phys.jump_apex + reach - 6.0:
        cands = [(x0, 0.0)]
        if s.contains_x(d.x - 50.0, 0.0):
            cands.append((s.clamp_x(d.x - 50.0, 2.0), 60.0))
        if s.contains_x(d.x + 50.0, 0.0):
            cands.append((s.clamp_x(d.x + 50.0, 2.0), -60.0))
        for ax, vx in cands:
            if abs(d.x - ax) <= 40.0 or vx != 0.0:
                hints.append(CollectHint((d.x, d.y), ax, jump=True, takeoff_vx=vx))
    return hints


def _rect_pickup_hints(d, s: Surface, phys: PhysicsConfig) -> list[CollectHint]:
    x0 = s.clamp_x(d.x, 4.0)
    h0 = min(max(math.sqrt(phys.rect_area), phys.h_min), phys.h_max)
    slop = phys.pickup_slop
    hints: list[CollectHint] = []
    if abs(d.x - x0) > 0.5 * phys.rect_width(phys.h_max) + slop:
        return hints
    if s.y - h0 - slop + 2.0 <= d.y <= s.y + slop - 1.0:
        hints.append(CollectHint((d.x, d.y), x0))
    want = s.y - d.y + 2.0             # height whose top swallows the diamond
    if h0 < want <= phys.h_max:
        if abs(d.x - x0) <= 0.5 * phys.rect_width(want) + slop - 2.0:
            hints.append(CollectHint((d.x, d.y), x0, target_height=want))
    return hints


def _verify_pickup(aw0: ArrayWorld, role: Role, s: Surface, hint: CollectHint,
                   diamond_index: int, phys: PhysicsConfig) -> tuple[bool, int]:
    aw = aw0.copy()
    stage = s.clamp_x(hint.approach_x - 70.0, 2.0)
    if abs(stage - hint.approach_x) < 20.0:
        stage = s.clamp_x(hint.approach_x + 70.0, 2.0)
    height = None
    if role is Role.Rectangle:
        # arrive the way travel leaves us: squashed if the surface runs
        # under something low
        height = rect_travel_height(aw.level, phys, s.y,
                                    min(stage, hint.approach_x),
                                    max(stage, hint.approach_x))
        if height is None:
            return False, 0
    place_character(aw, role, s, stage, 0.0, height)
    budget = 360 + int(0.6 * abs(hint.approach_x - stage))
    runner = CollectRunner(role, phys, hint, s, budget_ticks=budget)
    return run_collect(aw, role, runner, diamond_index)


def solo_tasks(level: LevelSpec, cfg: Config, graph: NavGraph,
               role: Role) -> dict[int, CollectTask]:
    """Cheapest verified pickup per diamond, restricted to reachable nodes."""
    phys = cfg.physics
    start = spawn_node(graph, level, role)
    if start is None:
        return {}
    dist, _ = dijkstra(graph, start)
    aw0 = ArrayWorld(_solo_with_diamonds(level, role), cfg, seed=0)

    out: dict[int, CollectTask] = {}
    for di, d in enumerate(level.diamonds):
        best: CollectTask | None = None
        for node in graph.nodes:
            if math.isinf(dist[node.index]):
                continue
            s = node.surface
            if not s.contains_x(d.x, 60.0):
                continue
            if role is Role.Circle:
                hints = _circle_pickup_hints(d, s, phys)
            else:
                hints = _rect_pickup_hints(d, s, phys)
            for hint in hints:
                ok, ticks = _verify_pickup(aw0, role, s, hint, di, phys)
                if not ok:
                    continue
                cost = ticks * phys.dt
                if best is None or cost < best.cost:
                    best = CollectTask(di, node.index, hint, cost)
        if best is not None:
            out[di] = best
    return out


def _coop_height_item(di: int, d, level: LevelSpec, phys: PhysicsConfig,
                      cgraph: NavGraph, rgraph: NavGraph,
                      cdist: list[float], rdist: list[float]) -> CoopPlanItem | None:
    reach = _reach(phys)
    r = phys.circle_radius
    best: CoopPlanItem | None = None
    for node in rgraph.nodes:
        if math.isinf(rdist[node.index]):
            continue
        s = node.surface
        if not s.contains_x(d.x, 40.0) or s.y <= d.y:
            continue
        need = s.y - d.y
        # riding center sits at s.y - h - r; standing catch wants it near the diamond
        h = need - (r + reach - 10.0)
        jump = False
        if h > phys.h_max:
            # too high to lift alone: jump off the raised top
            if need > phys.h_max + r + phys.jump_apex + reach - 8.0:
                continue
            h = phys.h_max
            jump = True
        elif h < phys.h_min:
            h = phys.h_min
            if abs((s.y - h - r) - d.y) > reach - 3.0:
                continue
        park = s.clamp_x(d.x, 20.0)

        half_low = 0.5 * phys.rect_width(phys.h_min)
        side = half_low + r + RIDE_SIDE_PAD
        mount = None
        for mx in (park - side, park + side):
            cn = cgraph.node_at(mx, s.y)
            if cn is not None and not math.isinf(cdist[cn.index]):
                mount = (cn.index, mx)
                break
        if mount is None:
            # board from a neighbouring ledge at jumpable rise
            low_top = s.y - phys.h_min
            for cn in cgraph.nodes:
                if math.isinf(cdist[cn.index]):
                    continue
                rise = cn.surface.y - low_top
                if not (-10.0 <= rise <= MOUNT_RISE_MAX):
                    continue
                gap = max(cn.surface.x_left - park, park - cn.surface.x_right, 0.0)
                if gap > 150.0:
                    continue
                mount = (cn.index, cn.surface.clamp_x(park, 2.0))
                break
        if mount is None:
            continue

        lift_time = abs(h - phys.h_min) / phys.morph_rate
        est = rdist[node.index] + cdist[mount[0]] + lift_time + 4.0
        item = CoopPlanItem(di, node.index, park, h, jump, mount[0], mount[1], est)
        if best is None or item.est_cost < best.est_cost:
            best = item
    return best


def classify(level: LevelSpec, cfg: Config, cgraph: NavGraph,
             rgraph: NavGraph,
             ctasks: dict[int, CollectTask] | None = None,
             rtasks: dict[int, CollectTask] | None = None) -> list[DiamondAssignment]:
    """Mode and verified pickup options for every diamond in the level."""
    phys = cfg.physics
    if ctasks is None:
        ctasks = solo_tasks(level, cfg, cgraph, Role.Circle)
    if rtasks is None:
        rtasks = solo_tasks(level, cfg, rgraph, Role.Rectangle)

    cstart = spawn_node(cgraph, level, Role.Circle)
    rstart = spawn_node(rgraph, level, Role.Rectangle)
    cdist = dijkstra(cgraph, cstart)[0] if cstart is not None else [math.inf] * len(cgraph.nodes)
    rdist = dijkstra(rgraph, rstart)[0] if rstart is not None else [math.inf] * len(rgraph.nodes)

    out: list[DiamondAssignment] = []
    for di, d in enumerate(level.diamonds):
        c = ctasks.get(di)
        rt = rtasks.get(di)
        if c is not None and rt is not None:
            out.append(DiamondAssignment(di, MODE_EITHER, circle=c, rect=rt))
            continue
        if c is not None:
            out.append(DiamondAssignment(di, MODE_CIRCLE, circle=c))
            continue
        if rt is not None:
            out.append(DiamondAssignment(di, MODE_RECT, rect=rt))
            continue
        if cstart is not None and rstart is not None:
            item = _coop_height_item(di, d, level, phys, cgraph, rgraph, cdist, rdist)
            if item is not None:
                out.append(DiamondAssignment(di, MODE_COOP, coop=item))
                continue
        out.append(DiamondAssignment(di, MODE_UNREACHABLE))
    return out
