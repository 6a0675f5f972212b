"""Low-level motion control shared by every agent.

Discrete actions make classic continuous control awkward, so the scheme is:
a braking velocity profile picks the speed we should have at this distance
from the target, a PID loop turns the velocity error into an effort, and a
deadband turns effort into left/right/coast.  The same loop serves both
characters; only the action names differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..config import PhysicsConfig
from ..world.types import Action


@dataclass
class PidGains:
    # the plant is a slew-limited integrator; kp dominates, the derivative
    # only takes the edge off near zero error or it fights the slew
    kp: float = 0.8
    ki: float = 0.02
    kd: float = 0.01
    integral_cap: float = 200.0
    deadband: float = 2.0


class VelocityController:
    """PID on velocity error, discretized to drive/coast/brake."""

    def __init__(self, gains: PidGains | None = None):
        self.gains = gains or PidGains()
        self.integral = 0.0
        self.prev_error: float | None = None

    def reset(self) -> None:
        self.integral = 0.0
        self.prev_error = None

    def effort(self, vx: float, v_desired: float, dt: float) -> float:
        g = self.gains
        err = v_desired - vx
        self.integral = max(-g.integral_cap, min(g.integral_cap, self.integral + err * dt))
        deriv = 0.0 if self.prev_error is None else (err - self.prev_error) / dt
        self.prev_error = err
        return g.kp * err + g.ki * self.integral + g.kd * deriv

    def direction(self, vx: float, v_desired: float, dt: float) -> int:
        u = self.effort(vx, v_desired, dt)
        if u > self.gains.deadband:
            return 1
        if u < -self.gains.deadband:
            return -1
        return 0


def braking_speed(x: float, target_x: float, target_vx: float, vmax: float,
                  accel: float, safety: float = 0.8) -> float:
    """Speed we want right now so we arrive at target_x moving at target_vx.

    Uses a derated acceleration so the discrete controller has margin to
    actually shed the speed in time.
    """
    dx = target_x - x
    if abs(dx) < 1e-9:
        return target_vx
    a = safety * accel
    mag = min(vmax, math.sqrt(target_vx * target_vx + 2.0 * a * abs(dx)))
    return math.copysign(mag, dx)


def circle_drive(direction: int) -> Action | None:
    if direction > 0:
        return Action.RollRight
    if direction < 0:
        return Action.RollLeft
    return None


def rect_drive(direction: int) -> Action | None:
    if direction > 0:
        return Action.SlideRight
    if direction < 0:
        return Action.SlideLeft
    return None


def morph_toward(height: float, target: float, phys: PhysicsConfig) -> Action | None:
    """One-tick height band keeps the controller from chattering."""
    band = phys.morph_rate * phys.dt
    if height < target - band:
        return Action.MorphUp
    if height > target + band:
        return Action.MorphDown
    return None


def stopping_distance(vx: float, accel: float, safety: float = 0.8) -> float:
    return (vx * vx) / (2.0 * safety * accel)
