"""Edge and pickup execution.

The same runner drives a maneuver in two worlds: against the forward model
while the graph is being built (is this edge real?), and live through the
agent loop (do it now).  Keeping one implementation for both is what makes
verified edge costs trustworthy at runtime.

Runners are tick-by-tick state machines: feed the character's current view
in, get one action and a status out.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from ..config import PhysicsConfig
from ..agents.contract import CircleSensors, RectangleSensors, Role
from ..control.motion import (
    VelocityController,
    braking_speed,
    circle_drive,
    morph_toward,
    rect_drive,
)
from ..world import kernel as K
from ..world.engine import ArrayWorld
from ..world.types import Action
from .surfaces import Surface

RUNNING = "running"
DONE = "done"
FAILED = "failed"

LAND_Y_TOL = 3.0
ARRIVE_X_TOL = 20.0
ARRIVE_V_TOL = 40.0
JUMP_V_TOL = 30.0


class EdgeKind(enum.Enum):
    Roll = "roll"
    Jump = "jump"
    Fall = "fall"
    Slide = "slide"
    MorphGap = "morphgap"
    CoopRide = "coopride"
    CoopPush = "cooppush"


@dataclass(frozen=True)
class EdgeHint:
    """Everything a runner needs to attempt one traversal."""

    kind: EdgeKind
    direction: int
    takeoff_x: float
    takeoff_vx: float
    target_x: float
    travel_height: float | None = None


@dataclass(frozen=True)
class CharView:
    x: float
    y: float
    vx: float
    vy: float
    grounded: bool
    height: float | None = None

    def standing_y(self, phys: PhysicsConfig, role: Role) -> float:
        if role is Role.Circle:
            return self.y + phys.circle_radius
        return self.y + 0.5 * (self.height if self.height is not None else phys.h_min)


def view_from_sensors(sensors: CircleSensors | RectangleSensors) -> CharView:
    if isinstance(sensors, CircleSensors):
        return CharView(x=sensors.x, y=sensors.y, vx=sensors.vx, vy=sensors.vy,
                        grounded=sensors.grounded)
    return CharView(x=sensors.x, y=sensors.y, vx=sensors.vx, vy=sensors.vy,
                    grounded=sensors.grounded, height=sensors.height)


def view_from_array(aw: ArrayWorld, role: Role) -> CharView:
    s = aw.state
    if role is Role.Circle:
        return CharView(x=s[K.S_CX], y=s[K.S_CY], vx=s[K.S_CVX], vy=s[K.S_CVY],
                        grounded=s[K.S_CGROUND] > 0.5)
    return CharView(x=s[K.S_RX], y=s[K.S_RY], vx=s[K.S_RVX], vy=s[K.S_RVY],
                    grounded=s[K.S_RGROUND] > 0.5, height=s[K.S_RH])


def _drive(role: Role, direction: int) -> Action | None:
    return circle_drive(direction) if role is Role.Circle else rect_drive(direction)


def takeoff_speed(me: CharView, takeoff_x: float, takeoff_vx: float,
                   vmax: float, accel: float) -> float:
    """Desired speed while lining up a moving takeoff.

    A fast takeoff needs runway: if the remaining distance cannot build the
    required speed, back off behind the takeoff point first instead of
    orbiting it at half speed forever.
    """
    need = abs(takeoff_vx)
    if need < 1e-9:
        return braking_speed(me.x, takeoff_x, 0.0, vmax, accel)
    d = 1 if takeoff_vx > 0 else -1
    have = max(d * me.vx, 0.0)
    dist = d * (takeoff_x - me.x)
    min_run = max(need * need - have * have, 0.0) / (2.0 * accel)
    if dist < min_run * 1.1 + 2.0:
        back = takeoff_x - d * (need * need / (2.0 * accel) + 30.0)
        return braking_speed(me.x, back, 0.0, vmax, accel)
    return braking_speed(me.x, takeoff_x, takeoff_vx, vmax, accel)


class EdgeRunner:
    """Executes one nav edge attempt; see EdgeKind for the maneuver types."""

    def __init__(self, role: Role, phys: PhysicsConfig, hint: EdgeHint,
                 src: Surface, dst: Surface, budget_ticks: int = 420):
        self.role = role
        self.phys = phys
        self.hint = hint
        self.src = src
        self.dst = dst
        self.budget = budget_ticks
        self.vc = VelocityController()
        self.phase = "drive"
        self.ticks = 0
        self.retries = 0
        self._accel = phys.roll_accel if role is Role.Circle else phys.slide_accel
        self._vmax = phys.max_roll_speed if role is Role.Circle else phys.max_slide_speed

    def _on(self, me: CharView, surface: Surface, slack: float = 4.0) -> bool:
        return (abs(me.standing_y(self.phys, self.role) - surface.y) <= LAND_Y_TOL
                and surface.contains_x(me.x, slack))

    def next_action(self, me: CharView) -> tuple[Action | None, str]:
        self.ticks += 1
        if self.ticks > self.budget:
            return None, FAILED
        if self.phase == "fly":
            return self._fly(me)
        return self._drive_phase(me)

    def _drive_phase(self, me: CharView) -> tuple[Action | None, str]:
        h = self.hint
        dt = self.phys.dt

        if self.role is Role.Rectangle and h.travel_height is not None:
            err = abs((me.height or 0.0) - h.travel_height)
            band = self.phys.morph_rate * dt
            if err > band:
                m = morph_toward(me.height or 0.0, h.travel_height, self.phys)
                # big mismatch: fix shape first; small: trim while rolling on
                if m is not None and (err > 12.0 or self.ticks % 3 == 0):
                    return m, RUNNING

        if h.kind is EdgeKind.Jump:
            if me.standing_y(self.phys, self.role) > self.src.y + 25.0:
                return None, FAILED  # slipped off the takeoff surface
            window = max(5.0, abs(h.takeoff_vx) * dt * 2.0 + 2.0)
            if (me.grounded and abs(me.x - h.takeoff_x) <= window
                    and abs(me.vx - h.takeoff_vx) <= JUMP_V_TOL):
                self.phase = "fly"
                return Action.Jump, RUNNING
            vdes = takeoff_speed(me, h.takeoff_x, h.takeoff_vx, self._vmax, self._accel)
            return _drive(self.role, self.vc.direction(me.vx, vdes, dt)), RUNNING

        if h.kind is EdgeKind.Fall:
            if not me.grounded:
                self.phase = "fly"
                return self._fly(me)
            overshoot = h.takeoff_x + h.direction * 30.0
            vdes = braking_speed(me.x, overshoot, h.takeoff_vx, self._vmax, self._accel)
            return _drive(self.role, self.vc.direction(me.vx, vdes, dt)), RUNNING

        # flat travel: Roll, Slide, MorphGap
        standing = me.standing_y(self.phys, self.role)
        if standing > max(self.src.y, self.dst.y) + 25.0:
            return None, FAILED  # fell off somewhere
        if (me.grounded and self._on(me, self.dst)
                and abs(me.x - h.target_x) <= ARRIVE_X_TOL
                and abs(me.vx) <= ARRIVE_V_TOL):
            return None, DONE
        vdes = braking_speed(me.x, h.target_x, 0.0, self._vmax, self._accel)
        return _drive(self.role, self.vc.direction(me.vx, vdes, dt)), RUNNING

    def _fly(self, me: CharView) -> tuple[Action | None, str]:
        if me.grounded and me.vy >= -1e-9:
            if self._on(me, self.dst):
                return None, DONE
            if self._on(me, self.src) and self.retries < 2:
                self.retries += 1
                self.phase = "drive"
                self.vc.reset()
                return None, RUNNING
            return None, FAILED
        if self.role is Role.Rectangle:
            # the rectangle can steer in the air; aim for the landing spot
            vdes = braking_speed(me.x, self.hint.target_x, 0.0, self._vmax, self._accel)
            return rect_drive(self.vc.direction(me.vx, vdes, self.phys.dt)), RUNNING
        return None, RUNNING


@dataclass(frozen=True)
class CollectHint:
    """How to pick up one diamond from a given surface."""

    diamond: tuple[float, float]
    approach_x: float
    jump: bool = False
    takeoff_vx: float = 0.0
    target_height: float | None = None   # rect reach-up


class CollectRunner:
    def __init__(self, role: Role, phys: PhysicsConfig, hint: CollectHint,
                 surface: Surface, budget_ticks: int = 360):
        self.role = role
        self.phys = phys
        self.hint = hint
        self.surface = surface
        self.budget = budget_ticks
        self.vc = VelocityController()
        self.phase = "drive"
        self.ticks = 0
        self.retries = 0
        self._accel = phys.roll_accel if role is Role.Circle else phys.slide_accel
        self._vmax = phys.max_roll_speed if role is Role.Circle else phys.max_slide_speed

    def next_action(self, me: CharView, collected: bool) -> tuple[Action | None, str]:
        self.ticks += 1
        if collected:
            return None, DONE
        if self.ticks > self.budget:
            return None, FAILED
        h = self.hint
        dt = self.phys.dt

        if self.phase == "fly":
            if me.grounded and me.vy >= -1e-9:
                if self.retries < 3:
                    self.retries += 1
                    self.phase = "drive"
                    self.vc.reset()
                else:
                    return None, FAILED
            return None, RUNNING

        if self.role is Role.Rectangle:
            if abs(me.x - h.approach_x) <= 12.0 and abs(me.vx) <= 30.0:
                want = h.target_height
                if want is None:
                    # arrived squashed from a low passage: grow until the
                    # top edge reaches the diamond again
                    need = self.surface.y - h.diamond[1] + 2.0
                    cur = me.height or 0.0
                    if need > cur + self.phys.pickup_slop - 3.0:
                        want = min(need, self.phys.h_max)
                if want is not None:
                    m = morph_toward(me.height or 0.0, want, self.phys)
                    if m is not None:
                        return m, RUNNING
                return None, RUNNING  # in position, waiting on the pickup
            vdes = braking_speed(me.x, h.approach_x, 0.0, self._vmax, self._accel)
            return rect_drive(self.vc.direction(me.vx, vdes, dt)), RUNNING

        if h.jump:
            window = max(5.0, abs(h.takeoff_vx) * dt * 2.0 + 2.0)
            if (me.grounded and abs(me.x - h.approach_x) <= window
                    and abs(me.vx - h.takeoff_vx) <= JUMP_V_TOL):
                self.phase = "fly"
                return Action.Jump, RUNNING
            vdes = takeoff_speed(me, h.approach_x, h.takeoff_vx, self._vmax, self._accel)
            return circle_drive(self.vc.direction(me.vx, vdes, dt)), RUNNING

        # rolling pickup: drive through the point
        vdes = braking_speed(me.x, h.approach_x, 0.0, self._vmax, self._accel)
        return circle_drive(self.vc.direction(me.vx, vdes, dt)), RUNNING


# ---------------------------------------------------------------------------
# forward-model helpers for verification


def place_character(aw: ArrayWorld, role: Role, surface: Surface, x: float,
                    vx: float = 0.0, height: float | None = None) -> None:
    """Stand the character at rest on a surface and settle contacts."""
    s = aw.state
    phys = aw.phys
    if role is Role.Circle:
        s[K.S_CX] = x
        s[K.S_CY] = surface.y - phys.circle_radius
        s[K.S_CVX] = vx
        s[K.S_CVY] = 0.0
        s[K.S_COMEGA] = vx / phys.circle_radius
    else:
        h = height if height is not None else s[K.S_RH]
        s[K.S_RH] = h
        s[K.S_RX] = x
        s[K.S_RY] = surface.y - 0.5 * h
        s[K.S_RVX] = vx
        s[K.S_RVY] = 0.0
    K._resolve_all(aw.state, aw.plats, aw.cfgv, aw.has_circle, aw.has_rect)


def run_edge(aw: ArrayWorld, role: Role, runner: EdgeRunner) -> tuple[bool, int]:
    """Drive a runner against the forward model; returns (ok, ticks used)."""
    for t in range(runner.budget + 1):
        action, status = runner.next_action(view_from_array(aw, role))
        if status == DONE:
            return True, t
        if status == FAILED:
            return False, t
        if role is Role.Circle:
            aw.step(action, None)
        else:
            aw.step(None, action)
    return False, runner.budget


def run_collect(aw: ArrayWorld, role: Role, runner: CollectRunner,
                diamond_index: int) -> tuple[bool, int]:
    for t in range(runner.budget + 1):
        collected = aw.diamonds[diamond_index, 2] != 0.0
        action, status = runner.next_action(view_from_array(aw, role), collected)
        if status == DONE:
            return True, t
        if status == FAILED:
            return False, t
        if role is Role.Circle:
            aw.step(action, None)
        else:
            aw.step(None, action)
    return False, runner.budget
