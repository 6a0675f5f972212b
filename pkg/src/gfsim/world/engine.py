"""Simulation driver around the flat-array kernels.

``ArrayWorld`` is the mutable stepping workhorse: it owns the packed arrays
and advances them in place.  The functional wrappers (``make_world``,
``step``, ``rollout`` and friends) translate between immutable
``WorldState`` snapshots and the array form, which keeps the public
contract value-oriented while the hot loop stays allocation-free.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from ..config import Config, PhysicsConfig
from ..levels.model import LevelSpec
from . import kernel as K
from .types import (
    CIRCLE_ACTIONS,
    RECTANGLE_ACTIONS,
    Action,
    CircleState,
    DiamondState,
    IllegalAction,
    InconsistentWorld,
    RectangleState,
    WorldState,
)


def pack_config(phys: PhysicsConfig) -> np.ndarray:
    vec = np.zeros(K.CFG_SIZE, dtype=np.float64)
    vec[K.C_DT] = phys.dt
    vec[K.C_GRAVITY] = phys.gravity
    vec[K.C_RADIUS] = phys.circle_radius
    vec[K.C_ROLL_ACCEL] = phys.roll_accel
    vec[K.C_MAX_ROLL] = phys.max_roll_speed
    vec[K.C_JUMP_SPEED] = phys.jump_speed
    vec[K.C_SLIDE_ACCEL] = phys.slide_accel
    vec[K.C_MAX_SLIDE] = phys.max_slide_speed
    vec[K.C_MORPH_RATE] = phys.morph_rate
    vec[K.C_RECT_AREA] = phys.rect_area
    vec[K.C_HMIN] = phys.h_min
    vec[K.C_HMAX] = phys.h_max
    vec[K.C_FRICTION] = phys.ground_friction
    vec[K.C_SPIN_COUPLE] = phys.spin_coupling
    vec[K.C_RESTITUTION] = phys.restitution
    vec[K.C_NOISE_STD] = phys.noise_std
    vec[K.C_ARENA_W] = phys.arena_width
    vec[K.C_ARENA_H] = phys.arena_height
    vec[K.C_ROLL_RESIST] = phys.roll_resist
    vec[K.C_PICKUP] = phys.pickup_slop
    return vec


def pack_platforms(level: LevelSpec) -> np.ndarray:
    plats = np.zeros((len(level.platforms), 5), dtype=np.float64)
    for i, p in enumerate(level.platforms):
        plats[i, 0] = p.x
        plats[i, 1] = p.y
        plats[i, 2] = p.w
        plats[i, 3] = p.h
        plats[i, 4] = p.color.code
    return plats


def _spawn_rect_height(phys: PhysicsConfig) -> float:
    # square spawn shape; clamp in case area moved outside the height band
    h = float(np.sqrt(phys.rect_area))
    return min(max(h, phys.h_min), phys.h_max)


_ACTION_CODE = {None: K.A_NONE}
for _a in Action:
    _ACTION_CODE[_a] = int(_a)


def _check_actions(ca: Action | None, ra: Action | None, has_c: bool, has_r: bool) -> tuple[int, int]:
    if ca is not None and ca not in CIRCLE_ACTIONS:
        raise IllegalAction("not a circle action: %s" % ca.name)
    if ra is not None and ra not in RECTANGLE_ACTIONS:
        raise IllegalAction("not a rectangle action: %s" % ra.name)
    if not has_c and ca not in (None, Action.NoAction):
        raise IllegalAction("circle action %s but level has no circle" % ca.name)
    if not has_r and ra not in (None, Action.NoAction):
        raise IllegalAction("rectangle action %s but level has no rectangle" % ra.name)
    return _ACTION_CODE[ca], _ACTION_CODE[ra]


class ArrayWorld:
    """Mutable packed world: one state vector, one diamond table, one tick.

    Stepping is in place.  ``snapshot``/``load`` convert to and from the
    immutable form at module boundaries.
    """

    __slots__ = ("state", "diamonds", "plats", "cfgv", "has_circle", "has_rect",
                 "tick", "seed", "_seed_u64", "level", "phys")

    def __init__(self, level: LevelSpec, cfg: Config, seed: int = 0):
        self.level = level
        self.phys = cfg.physics
        self.cfgv = pack_config(cfg.physics)
        # the level's own area wins over the config default
        self.cfgv[K.C_ARENA_W] = level.width
        self.cfgv[K.C_ARENA_H] = level.height
        self.plats = pack_platforms(level)
        self.state = np.zeros(K.STATE_SIZE, dtype=np.float64)
        self.diamonds = np.zeros((len(level.diamonds), 3), dtype=np.float64)
        for i, d in enumerate(level.diamonds):
            self.diamonds[i, 0] = d.x
            self.diamonds[i, 1] = d.y
        self.has_circle = 1 if level.circle_spawn is not None else 0
        self.has_rect = 1 if level.rectangle_spawn is not None else 0
        if self.has_circle:
            self.state[K.S_CX] = level.circle_spawn[0]
            self.state[K.S_CY] = level.circle_spawn[1]
        if self.has_rect:
            self.state[K.S_RX] = level.rectangle_spawn[0]
            self.state[K.S_RY] = level.rectangle_spawn[1]
            self.state[K.S_RH] = _spawn_rect_height(cfg.physics)
        else:
            self.state[K.S_RH] = 1.0  # keep width finite for the kernels
        self.tick = 0
        self.seed = seed
        self._seed_u64 = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
        # settle spawn contacts so grounded flags are valid at tick 0
        K._resolve_all(self.state, self.plats, self.cfgv, self.has_circle, self.has_rect)

    def copy(self) -> "ArrayWorld":
        other = object.__new__(ArrayWorld)
        other.level = self.level
        other.phys = self.phys
        other.cfgv = self.cfgv
        other.plats = self.plats
        other.state = self.state.copy()
        other.diamonds = self.diamonds.copy()
        other.has_circle = self.has_circle
        other.has_rect = self.has_rect
        other.tick = self.tick
        other.seed = self.seed
        other._seed_u64 = self._seed_u64
        return other

    def step(self, circle_action: Action | None = None, rect_action: Action | None = None) -> int:
        """Advance one tick; returns how many diamonds were collected."""
        ca, ra = _check_actions(circle_action, rect_action, bool(self.has_circle), bool(self.has_rect))
        got = K._step_core(
            self.state, self.diamonds, self.plats, self.cfgv,
            ca, ra, self.has_circle, self.has_rect, self._seed_u64, self.tick,
        )
        self.tick += 1
        return int(got)

    def rollout(self, script: np.ndarray, nticks: int) -> int:
        """Scripted stepping in one kernel call; mutates this world.

        Returns the tick after which all diamonds were collected, or -1.
        """
        done = K._rollout_core(
            self.state, self.diamonds, self.plats, self.cfgv,
            script, nticks, self.has_circle, self.has_rect, self._seed_u64, self.tick,
        )
        self.tick += nticks
        return int(done)

    @property
    def uncollected(self) -> int:
        return int(np.count_nonzero(self.diamonds[:, 2] == 0.0))

    @property
    def all_collected(self) -> bool:
        return self.uncollected == 0

    @property
    def elapsed(self) -> float:
        return self.tick * self.phys.dt

    def circle(self) -> CircleState | None:
        if not self.has_circle:
            return None
        s = self.state
        return CircleState(
            x=float(s[K.S_CX]), y=float(s[K.S_CY]),
            vx=float(s[K.S_CVX]), vy=float(s[K.S_CVY]),
            angular_velocity=float(s[K.S_COMEGA]),
            grounded=bool(s[K.S_CGROUND] > 0.5),
        )

    def rectangle(self) -> RectangleState | None:
        if not self.has_rect:
            return None
        s = self.state
        return RectangleState(
            x=float(s[K.S_RX]), y=float(s[K.S_RY]),
            vx=float(s[K.S_RVX]), vy=float(s[K.S_RVY]),
            height=float(s[K.S_RH]),
            grounded=bool(s[K.S_RGROUND] > 0.5),
        )

    def snapshot(self) -> WorldState:
        diamonds = tuple(
            DiamondState(x=float(d[0]), y=float(d[1]), collected=bool(d[2] != 0.0))
            for d in self.diamonds
        )
        return WorldState(tick=self.tick, circle=self.circle(), rectangle=self.rectangle(),
                          diamonds=diamonds)

    def load(self, world: WorldState) -> None:
        """Overwrite the packed arrays from a snapshot of the same level."""
        if len(world.diamonds) != len(self.level.diamonds):
            raise InconsistentWorld(
                "snapshot has %d diamonds, level has %d"
                % (len(world.diamonds), len(self.level.diamonds))
            )
        if (world.circle is not None) != bool(self.has_circle):
            raise InconsistentWorld("snapshot and level disagree about the circle")
        if (world.rectangle is not None) != bool(self.has_rect):
            raise InconsistentWorld("snapshot and level disagree about the rectangle")
        s = self.state
        if world.circle is not None:
            c = world.circle
            s[K.S_CX], s[K.S_CY], s[K.S_CVX], s[K.S_CVY] = c.x, c.y, c.vx, c.vy
            s[K.S_COMEGA] = c.angular_velocity
            s[K.S_CGROUND] = 1.0 if c.grounded else 0.0
        if world.rectangle is not None:
            r = world.rectangle
            s[K.S_RX], s[K.S_RY], s[K.S_RVX], s[K.S_RVY] = r.x, r.y, r.vx, r.vy
            s[K.S_RH] = r.height
            s[K.S_RGROUND] = 1.0 if r.grounded else 0.0
        for i, d in enumerate(world.diamonds):
            self.diamonds[i, 0] = d.x
            self.diamonds[i, 1] = d.y
            self.diamonds[i, 2] = 1.0 if d.collected else 0.0
        if not np.all(np.isfinite(self.state)):
            raise InconsistentWorld("non-finite values in world state")
        self.tick = world.tick

    def hash(self) -> str:
        h = hashlib.sha256()
        h.update(struct.pack("<q2i", self.tick, self.has_circle, self.has_rect))
        h.update(self.state.tobytes())
        h.update(self.diamonds.tobytes())
        return h.hexdigest()


# ---------------------------------------------------------------------------
# functional wrappers


def make_world(level: LevelSpec, cfg: Config, seed: int = 0) -> WorldState:
    """Spawn both characters at rest on their spawn points, settle contacts."""
    return ArrayWorld(level, cfg, seed=seed).snapshot()


def step(world: WorldState, circle_action: Action | None, rect_action: Action | None,
         level: LevelSpec, cfg: Config, seed: int = 0) -> WorldState:
    aw = ArrayWorld(level, cfg, seed=seed)
    aw.load(world)
    aw.step(circle_action, rect_action)
    return aw.snapshot()


def rollout(world: WorldState, script, nticks: int, level: LevelSpec, cfg: Config,
            seed: int = 0) -> tuple[WorldState, int]:
    """Apply a per-tick action script to a copy of the world.

    Args:
        script: sequence of (circle_action, rect_action) pairs; shorter
            scripts are padded with NoAction, longer ones truncated.
        nticks: number of ticks to advance.

    Returns:
        (final snapshot, tick after which everything was collected or -1).
    """
    aw = ArrayWorld(level, cfg, seed=seed)
    aw.load(world)
    arr = pack_script(script, nticks, bool(aw.has_circle), bool(aw.has_rect))
    done = aw.rollout(arr, nticks)
    return aw.snapshot(), done


def pack_script(script, nticks: int, has_c: bool = True, has_r: bool = True) -> np.ndarray:
    arr = np.zeros((nticks, 2), dtype=np.int64)
    for k, (ca, ra) in enumerate(script):
        if k >= nticks:
            break
        ca_code, ra_code = _check_actions(ca, ra, has_c, has_r)
        arr[k, 0] = ca_code
        arr[k, 1] = ra_code
    return arr


def resolve_collisions(world: WorldState, level: LevelSpec, cfg: Config) -> WorldState:
    aw = ArrayWorld(level, cfg)
    aw.load(world)
    K._resolve_all(aw.state, aw.plats, aw.cfgv, aw.has_circle, aw.has_rect)
    return aw.snapshot()


def collect_diamonds(world: WorldState, level: LevelSpec, cfg: Config) -> WorldState:
    aw = ArrayWorld(level, cfg)
    aw.load(world)
    K._collect(aw.state, aw.diamonds, aw.cfgv, aw.has_circle, aw.has_rect)
    return aw.snapshot()


def world_hash(world: WorldState | ArrayWorld, level: LevelSpec | None = None,
               cfg: Config | None = None) -> str:
    """Stable digest of dynamic state (not geometry); snapshot form needs
    the level and config to reconstruct the packed layout."""
    if isinstance(world, ArrayWorld):
        return world.hash()
    if level is None or cfg is None:
        raise ValueError("hashing a snapshot needs level and cfg")
    aw = ArrayWorld(level, cfg)
    aw.load(world)
    return aw.hash()


# ---------------------------------------------------------------------------
# single-character action previews, used by controllers and tests; these
# mirror the kernel's action phase exactly but touch nothing else


def apply_circle_action(c: CircleState, action: Action | None, phys: PhysicsConfig,
                        support_vx: float = 0.0) -> CircleState:
    if action is not None and action not in CIRCLE_ACTIONS:
        raise IllegalAction("not a circle action: %s" % action.name)
    dt = phys.dt
    r = phys.circle_radius
    vmax = phys.max_roll_speed
    wcap = vmax / r
    vx, vy, w = c.vx, c.vy, c.angular_velocity
    if action is Action.RollRight:
        if w < wcap:
            w = min(wcap, w + (phys.roll_accel / r) * dt)
        if c.grounded:
            rel = vx - support_vx
            if rel < vmax:
                vx = min(vmax, rel + phys.roll_accel * dt) + support_vx
    elif action is Action.RollLeft:
        if w > -wcap:
            w = max(-wcap, w - (phys.roll_accel / r) * dt)
        if c.grounded:
            rel = vx - support_vx
            if rel > -vmax:
                vx = max(-vmax, rel - phys.roll_accel * dt) + support_vx
    else:
        if c.grounded:
            rel = vx - support_vx
            dec = phys.roll_resist * dt
            rel = rel - dec if rel > dec else (rel + dec if rel < -dec else 0.0)
            vx = rel + support_vx
            wdec = (phys.roll_resist / r) * dt
            w = w - wdec if w > wdec else (w + wdec if w < -wdec else 0.0)
    if c.grounded:
        rel = vx - support_vx
        vx += phys.spin_coupling * (w * r - rel) * dt
    if action is Action.Jump and c.grounded:
        vy = -phys.jump_speed
    return c.moved(vx=vx, vy=vy, angular_velocity=w)


def apply_rectangle_action(r: RectangleState, action: Action | None,
                           phys: PhysicsConfig) -> RectangleState:
    if action is not None and action not in RECTANGLE_ACTIONS:
        raise IllegalAction("not a rectangle action: %s" % action.name)
    dt = phys.dt
    vx, h = r.vx, r.height
    if action is Action.SlideRight:
        if vx < phys.max_slide_speed:
            vx = min(phys.max_slide_speed, vx + phys.slide_accel * dt)
    elif action is Action.SlideLeft:
        if vx > -phys.max_slide_speed:
            vx = max(-phys.max_slide_speed, vx - phys.slide_accel * dt)
    elif action is Action.MorphUp:
        h = min(phys.h_max, h + phys.morph_rate * dt)
    elif action is Action.MorphDown:
        h = max(phys.h_min, h - phys.morph_rate * dt)
    else:
        if r.grounded:
            dec = phys.ground_friction * dt
            vx = vx - dec if vx > dec else (vx + dec if vx < -dec else 0.0)
    return r.moved(vx=vx, height=h)
