"""Kinodynamic tree search straight on the forward model.

Last-resort planner for targets the nav graph cannot route to: grow a tree
of action holds from the current world, biased toward the goal, and return
the action script of the best branch.  Iteration-capped rather than
time-capped so the same seed always yields the same script.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..agents.contract import Role
from ..world import kernel as K
from ..world.engine import ArrayWorld
from ..world.types import CIRCLE_ACTIONS, RECTANGLE_ACTIONS, Action

HOLD_TICKS = 15          # 0.25 s per tree edge
GOAL_BIAS = 0.2
VEL_WEIGHT = 0.1


@dataclass(frozen=True)
class RrtResult:
    reached: bool
    script: tuple[Action, ...]
    best_dist: float
    iters: int


class _Node:
    __slots__ = ("world", "parent", "action", "ticks")

    def __init__(self, world, parent, action, ticks):
        self.world = world
        self.parent = parent
        self.action = action
        self.ticks = ticks


def _char_state(aw: ArrayWorld, role: Role) -> tuple[float, float, float, float]:
    s = aw.state
    if role is Role.Circle:
        return s[K.S_CX], s[K.S_CY], s[K.S_CVX], s[K.S_CVY]
    return s[K.S_RX], s[K.S_RY], s[K.S_RVX], s[K.S_RVY]


def _metric(aw: ArrayWorld, role: Role, tx: float, ty: float) -> float:
    x, y, vx, vy = _char_state(aw, role)
    return ((x - tx) ** 2 + (y - ty) ** 2) ** 0.5 + VEL_WEIGHT * ((vx * vx + vy * vy) ** 0.5)


def _script(leaf: _Node) -> tuple[Action, ...]:
    chunks = []
    node = leaf
    while node.parent is not None:
        chunks.append((node.action, node.ticks))
        node = node.parent
    chunks.reverse()
    out: list[Action] = []
    for action, ticks in chunks:
        out.extend([action] * ticks)
    return tuple(out)


def _grow(aw: ArrayWorld, role: Role, goal: tuple[float, float],
          reached, seed: int, max_iters: int, max_ticks: int) -> RrtResult:
    actions = sorted(CIRCLE_ACTIONS if role is Role.Circle else RECTANGLE_ACTIONS)
    rng = random.Random(seed)
    W = aw.level.width
    H = aw.level.height

    root = _Node(aw.copy(), None, Action.NoAction, 0)
    nodes = [root]
    best = root
    best_d = _metric(root.world, role, *goal)
    if reached(root.world):
        return RrtResult(True, (), 0.0, 0)

    for it in range(1, max_iters + 1):
        if rng.random() < GOAL_BIAS:
            sample = goal
        else:
            sample = (rng.uniform(0.0, W), rng.uniform(0.0, H))

        near = min(nodes, key=lambda n: _metric(n.world, role, *sample))
        if near.world.tick - root.world.tick >= max_ticks:
            continue

        child_world = None
        child_action = None
        child_ticks = 0
        child_score = None
        hit = False
        for action in actions:
            trial = near.world.copy()
            used = 0
            got_any = False
            for _ in range(HOLD_TICKS):
                if role is Role.Circle:
                    trial.step(action, None)
                else:
                    trial.step(None, action)
                used += 1
                if reached(trial):
                    got_any = True
                    break
            score = _metric(trial, role, *sample)
            if got_any:
                child_world, child_action, child_ticks = trial, action, used
                hit = True
                break
            if child_score is None or score < child_score:
                child_world, child_action, child_ticks, child_score = trial, action, used, score

        child = _Node(child_world, near, child_action, child_ticks)
        nodes.append(child)
        d = _metric(child_world, role, *goal)
        if hit or reached(child_world):
            return RrtResult(True, _script(child), d, it)
        if d < best_d:
            best, best_d = child, d

    return RrtResult(False, _script(best), best_d, max_iters)


def rrt_to_point(aw: ArrayWorld, role: Role, target: tuple[float, float],
                 tol: float = 25.0, seed: int = 0, max_iters: int = 400,
                 max_ticks: int = 900) -> RrtResult:
    def reached(world: ArrayWorld) -> bool:
        x, y, _, _ = _char_state(world, role)
        return ((x - target[0]) ** 2 + (y - target[1]) ** 2) ** 0.5 <= tol

    return _grow(aw, role, target, reached, seed, max_iters, max_ticks)


def rrt_to_diamond(aw: ArrayWorld, role: Role, diamond_index: int,
                   seed: int = 0, max_iters: int = 400,
                   max_ticks: int = 900) -> RrtResult:
    dx = float(aw.diamonds[diamond_index, 0])
    dy = float(aw.diamonds[diamond_index, 1])

    def reached(world: ArrayWorld) -> bool:
        return world.diamonds[diamond_index, 2] != 0.0

    return _grow(aw, role, (dx, dy), reached, seed, max_iters, max_ticks)
