"""Flat-array physics stepping kernels.

Everything here operates in place on plain float64 arrays so the hot loop
(stepping, rollouts, batch evaluation) can be compiled with numba.  Setting
``GF_PURE_PYTHON=1`` in the environment before import skips compilation and
runs the same code as ordinary Python; results are required to match the
compiled path bit for bit, which the test suite checks by subprocess.

Array layouts are part of this module's contract:

* state: float64[12], slots named by the ``S_*`` constants below.
* platforms: float64[m, 5] of x, y, w, h, color code (top-left anchored).
* diamonds: float64[n, 3] of x, y, collected flag.
* cfg: float64[20] packed by ``gfsim.world.engine.pack_config``.

Coordinates are y-down.  Jump therefore sets a negative vy.
"""

from __future__ import annotations

import math
import os

import numpy as np

_want_numba = os.environ.get("GF_PURE_PYTHON", "").lower() not in ("1", "true", "yes")
if _want_numba:
    try:
        from numba import njit
    except ImportError:
        _want_numba = False
if not _want_numba:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap

NUMBA_ENABLED = _want_numba

# state slots
S_CX, S_CY, S_CVX, S_CVY, S_COMEGA, S_CGROUND = 0, 1, 2, 3, 4, 5
S_RX, S_RY, S_RVX, S_RVY, S_RH, S_RGROUND = 6, 7, 8, 9, 10, 11
STATE_SIZE = 12

# cfg slots
C_DT = 0
C_GRAVITY = 1
C_RADIUS = 2
C_ROLL_ACCEL = 3
C_MAX_ROLL = 4
C_JUMP_SPEED = 5
C_SLIDE_ACCEL = 6
C_MAX_SLIDE = 7
C_MORPH_RATE = 8
C_RECT_AREA = 9
C_HMIN = 10
C_HMAX = 11
C_FRICTION = 12
C_SPIN_COUPLE = 13
C_RESTITUTION = 14
C_NOISE_STD = 15
C_ARENA_W = 16
C_ARENA_H = 17
C_ROLL_RESIST = 18
C_PICKUP = 19
CFG_SIZE = 20

# action codes, fixed wire values
A_NONE = 0
A_JUMP = 1
A_ROLL_LEFT = 2
A_ROLL_RIGHT = 3
A_SLIDE_LEFT = 4
A_SLIDE_RIGHT = 5
A_MORPH_UP = 6
A_MORPH_DOWN = 7

# platform color codes
COLOR_BLACK = 0.0
COLOR_GREEN = 1.0
COLOR_YELLOW = 2.0

# collision skin: contacts within this distance still count for grounding,
# so a resting body keeps its grounded flag between correction ticks
CONTACT_SLOP = 0.5
_GROUND_NY = -0.7


# ---------------------------------------------------------------------------
# counter-based noise: a hash of (seed, tick, channel) drives Box-Muller, so
# the stream is stateless and a rollout sees exactly what live stepping sees

_MASK64 = 0xFFFFFFFFFFFFFFFF
_M1_I = 0x9E3779B97F4A7C15
_M2_I = 0xBF58476D1CE4E5B9
_M3_I = 0x94D049BB133111EB
_TWO_PI = 6.283185307179586
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

if NUMBA_ENABLED:
    _M1 = np.uint64(_M1_I)
    _M2 = np.uint64(_M2_I)
    _M3 = np.uint64(_M3_I)
    _SH30 = np.uint64(30)
    _SH27 = np.uint64(27)
    _SH31 = np.uint64(31)
    _SH11 = np.uint64(11)
    _U1 = np.uint64(1)
    _U2 = np.uint64(2)

    @njit(cache=True)
    def _noise_pair(seed, tick, chan):
        base = seed + np.uint64(tick) * _M1 + np.uint64(chan) * _M3
        x = base + _U1
        x = (x ^ (x >> _SH30)) * _M2
        x = (x ^ (x >> _SH27)) * _M3
        u1 = x ^ (x >> _SH31)
        x = base + _U2
        x = (x ^ (x >> _SH30)) * _M2
        x = (x ^ (x >> _SH27)) * _M3
        u2 = x ^ (x >> _SH31)
        f1 = (np.float64(u1 >> _SH11) + 1.0) * _INV53
        f2 = np.float64(u2 >> _SH11) * _INV53
        rad = math.sqrt(-2.0 * math.log(f1))
        return rad * math.cos(_TWO_PI * f2), rad * math.sin(_TWO_PI * f2)

else:
    def _mix64_py(x: int) -> int:
        x = ((x ^ (x >> 30)) * _M2_I) & _MASK64
        x = ((x ^ (x >> 27)) * _M3_I) & _MASK64
        return x ^ (x >> 31)

    def _noise_pair(seed, tick, chan):
        base = (int(seed) + int(tick) * _M1_I + int(chan) * _M3_I) & _MASK64
        u1 = _mix64_py((base + 1) & _MASK64)
        u2 = _mix64_py((base + 2) & _MASK64)
        f1 = (float(u1 >> 11) + 1.0) * _INV53
        f2 = float(u2 >> 11) * _INV53
        rad = math.sqrt(-2.0 * math.log(f1))
        return rad * math.cos(_TWO_PI * f2), rad * math.sin(_TWO_PI * f2)


# ---------------------------------------------------------------------------
# collision resolution


@njit(cache=True)
def _resolve_circle_box(state, cfg, bx, by, bw, bh, bounce_min):
    r = cfg[C_RADIUS]
    cx = state[S_CX]
    cy = state[S_CY]
    qx = min(max(cx, bx), bx + bw)
    qy = min(max(cy, by), by + bh)
    dx = cx - qx
    dy = cy - qy
    d2 = dx * dx + dy * dy
    reach = r + CONTACT_SLOP
    if d2 >= reach * reach:
        return 0
    if d2 > 1e-18:
        d = math.sqrt(d2)
        nx = dx / d
        ny = dy / d
        pen = r - d
    else:
        # center inside the box: exit through the nearest face
        left = cx - bx
        right = bx + bw - cx
        top = cy - by
        bot = by + bh - cy
        m = min(min(left, right), min(top, bot))
        if m == left:
            nx, ny, pen = -1.0, 0.0, r + left
        elif m == right:
            nx, ny, pen = 1.0, 0.0, r + right
        elif m == top:
            nx, ny, pen = 0.0, -1.0, r + top
        else:
            nx, ny, pen = 0.0, 1.0, r + bot
    if pen > 0.0:
        state[S_CX] += nx * pen
        state[S_CY] += ny * pen
    vn = state[S_CVX] * nx + state[S_CVY] * ny
    if vn < 0.0:
        e = cfg[C_RESTITUTION] if -vn > bounce_min else 0.0
        state[S_CVX] -= (1.0 + e) * vn * nx
        state[S_CVY] -= (1.0 + e) * vn * ny
    return 1 if ny < _GROUND_NY else 0


@njit(cache=True)
def _resolve_rect_box(state, cfg, bx, by, bw, bh, bounce_min):
    rh = state[S_RH]
    rw = cfg[C_RECT_AREA] / rh
    rx = state[S_RX]
    ry = state[S_RY]
    ox = min(rx + 0.5 * rw, bx + bw) - max(rx - 0.5 * rw, bx)
    oy = min(ry + 0.5 * rh, by + bh) - max(ry - 0.5 * rh, by)
    if ox <= -CONTACT_SLOP or oy <= -CONTACT_SLOP:
        return 0
    if ox <= 0.0 and oy <= 0.0:
        return 0
    grounded = 0
    e = cfg[C_RESTITUTION]
    if oy <= ox:
        pen = oy if oy > 0.0 else 0.0
        if ry <= by + 0.5 * bh:
            state[S_RY] -= pen
            vy = state[S_RVY]
            if vy > 0.0:
                state[S_RVY] = -(e if vy > bounce_min else 0.0) * vy
            grounded = 1
        else:
            state[S_RY] += pen
            vy = state[S_RVY]
            if vy < 0.0:
                state[S_RVY] = -(e if -vy > bounce_min else 0.0) * vy
    else:
        pen = ox if ox > 0.0 else 0.0
        if rx <= bx + 0.5 * bw:
            state[S_RX] -= pen
            vx = state[S_RVX]
            if vx > 0.0:
                state[S_RVX] = -(e if vx > bounce_min else 0.0) * vx
        else:
            state[S_RX] += pen
            vx = state[S_RVX]
            if vx < 0.0:
                state[S_RVX] = -(e if -vx > bounce_min else 0.0) * vx
    return grounded


@njit(cache=True)
def _resolve_pair(state, cfg, bounce_min):
    """Circle vs rectangle, equal masses: split correction and impulse 50/50."""
    r = cfg[C_RADIUS]
    rh = state[S_RH]
    rw = cfg[C_RECT_AREA] / rh
    bx = state[S_RX] - 0.5 * rw
    by = state[S_RY] - 0.5 * rh
    cx = state[S_CX]
    cy = state[S_CY]
    qx = min(max(cx, bx), bx + rw)
    qy = min(max(cy, by), by + rh)
    dx = cx - qx
    dy = cy - qy
    d2 = dx * dx + dy * dy
    reach = r + CONTACT_SLOP
    if d2 >= reach * reach:
        return 0, 0
    if d2 > 1e-18:
        d = math.sqrt(d2)
        nx = dx / d
        ny = dy / d
        pen = r - d
    else:
        left = cx - bx
        right = bx + rw - cx
        top = cy - by
        bot = by + rh - cy
        m = min(min(left, right), min(top, bot))
        if m == left:
            nx, ny, pen = -1.0, 0.0, r + left
        elif m == right:
            nx, ny, pen = 1.0, 0.0, r + right
        elif m == top:
            nx, ny, pen = 0.0, -1.0, r + top
        else:
            nx, ny, pen = 0.0, 1.0, r + bot
    if pen > 0.0:
        half = 0.5 * pen
        state[S_CX] += nx * half
        state[S_CY] += ny * half
        state[S_RX] -= nx * half
        state[S_RY] -= ny * half
    vn = (state[S_CVX] - state[S_RVX]) * nx + (state[S_CVY] - state[S_RVY]) * ny
    if vn < 0.0:
        e = cfg[C_RESTITUTION] if -vn > bounce_min else 0.0
        j = -(1.0 + e) * vn * 0.5
        state[S_CVX] += j * nx
        state[S_CVY] += j * ny
        state[S_RVX] -= j * nx
        state[S_RVY] -= j * ny
    cg = 1 if ny < _GROUND_NY else 0
    rg = 1 if ny > -_GROUND_NY else 0
    return cg, rg


@njit(cache=True)
def _resolve_circle_walls(state, cfg, bounce_min):
    r = cfg[C_RADIUS]
    w = cfg[C_ARENA_W]
    h = cfg[C_ARENA_H]
    e = cfg[C_RESTITUTION]
    grounded = 0
    if state[S_CX] < r:
        state[S_CX] = r
        vx = state[S_CVX]
        if vx < 0.0:
            state[S_CVX] = -(e if -vx > bounce_min else 0.0) * vx
    elif state[S_CX] > w - r:
        state[S_CX] = w - r
        vx = state[S_CVX]
        if vx > 0.0:
            state[S_CVX] = -(e if vx > bounce_min else 0.0) * vx
    if state[S_CY] < r:
        state[S_CY] = r
        vy = state[S_CVY]
        if vy < 0.0:
            state[S_CVY] = -(e if -vy > bounce_min else 0.0) * vy
    elif state[S_CY] > h - r:
        state[S_CY] = h - r
        vy = state[S_CVY]
        if vy > 0.0:
            state[S_CVY] = -(e if vy > bounce_min else 0.0) * vy
        grounded = 1
    elif state[S_CY] > h - r - CONTACT_SLOP:
        grounded = 1
    return grounded


@njit(cache=True)
def _resolve_rect_walls(state, cfg, bounce_min):
    rh = state[S_RH]
    rw = cfg[C_RECT_AREA] / rh
    w = cfg[C_ARENA_W]
    h = cfg[C_ARENA_H]
    e = cfg[C_RESTITUTION]
    hx = 0.5 * rw
    hy = 0.5 * rh
    grounded = 0
    if state[S_RX] < hx:
        state[S_RX] = hx
        vx = state[S_RVX]
        if vx < 0.0:
            state[S_RVX] = -(e if -vx > bounce_min else 0.0) * vx
    elif state[S_RX] > w - hx:
        state[S_RX] = w - hx
        vx = state[S_RVX]
        if vx > 0.0:
            state[S_RVX] = -(e if vx > bounce_min else 0.0) * vx
    if state[S_RY] < hy:
        state[S_RY] = hy
        vy = state[S_RVY]
        if vy < 0.0:
            state[S_RVY] = -(e if -vy > bounce_min else 0.0) * vy
    elif state[S_RY] > h - hy:
        state[S_RY] = h - hy
        vy = state[S_RVY]
        if vy > 0.0:
            state[S_RVY] = -(e if vy > bounce_min else 0.0) * vy
        grounded = 1
    elif state[S_RY] > h - hy - CONTACT_SLOP:
        grounded = 1
    return grounded


@njit(cache=True)
def _resolve_all(state, plats, cfg, has_circle, has_rect):
    """One full resolution pass; updates positions, velocities, grounded flags.

    Order is fixed: circle against its platforms and walls, then rectangle
    against its own, then the pair contact.  Green passes the rectangle
    through, yellow passes the circle through.
    """
    bounce_min = 2.0 * cfg[C_GRAVITY] * cfg[C_DT]
    cg = 0
    rg = 0
    n = plats.shape[0]
    if has_circle != 0:
        for i in range(n):
            if plats[i, 4] != COLOR_YELLOW:
                cg |= _resolve_circle_box(
                    state, cfg, plats[i, 0], plats[i, 1], plats[i, 2], plats[i, 3], bounce_min
                )
        cg |= _resolve_circle_walls(state, cfg, bounce_min)
    if has_rect != 0:
        for i in range(n):
            if plats[i, 4] != COLOR_GREEN:
                rg |= _resolve_rect_box(
                    state, cfg, plats[i, 0], plats[i, 1], plats[i, 2], plats[i, 3], bounce_min
                )
        rg |= _resolve_rect_walls(state, cfg, bounce_min)
    if has_circle != 0 and has_rect != 0:
        pcg, prg = _resolve_pair(state, cfg, bounce_min)
        cg |= pcg
        rg |= prg
    state[S_CGROUND] = 1.0 if cg != 0 else 0.0
    state[S_RGROUND] = 1.0 if rg != 0 else 0.0


@njit(cache=True)
def _collect(state, diamonds, cfg, has_circle, has_rect):
    r = cfg[C_RADIUS]
    slop = cfg[C_PICKUP]
    rh = state[S_RH]
    rw = cfg[C_RECT_AREA] / rh
    n = diamonds.shape[0]
    got = 0
    for i in range(n):
        if diamonds[i, 2] != 0.0:
            continue
        px = diamonds[i, 0]
        py = diamonds[i, 1]
        if has_circle != 0:
            dx = px - state[S_CX]
            dy = py - state[S_CY]
            reach = r + slop
            if dx * dx + dy * dy <= reach * reach:
                diamonds[i, 2] = 1.0
                got += 1
                continue
        if has_rect != 0:
            qx = min(max(px, state[S_RX] - 0.5 * rw), state[S_RX] + 0.5 * rw)
            qy = min(max(py, state[S_RY] - 0.5 * rh), state[S_RY] + 0.5 * rh)
            dx = px - qx
            dy = py - qy
            if dx * dx + dy * dy <= slop * slop:
                diamonds[i, 2] = 1.0
                got += 1
    return got


@njit(cache=True)
def _circle_rides_rect(state, cfg):
    """Pre-step geometric check: is the circle resting on the rectangle?

    Used to pick the reference frame for rolling drive and resistance; the
    window is wider than the contact skin because a morphing top face moves
    by morphRate*dt per tick.
    """
    r = cfg[C_RADIUS]
    rh = state[S_RH]
    rw = cfg[C_RECT_AREA] / rh
    gap = (state[S_CY] + r) - (state[S_RY] - 0.5 * rh)
    if gap < -1.5 or gap > 1.5:
        return False
    return abs(state[S_CX] - state[S_RX]) <= 0.5 * rw + 0.7 * r


@njit(cache=True)
def _step_core(state, diamonds, plats, cfg, ca, ra, has_circle, has_rect, seed, tick):
    """Advance exactly one tick in the fixed order:

    action accelerations, gravity, optional velocity noise, velocity
    integration, collision resolution (circle, rectangle, pair), grounded
    flags, diamond pickup.  Returns the number of diamonds collected.
    """
    dt = cfg[C_DT]

    if has_circle != 0:
        support_vx = 0.0
        if has_rect != 0 and state[S_CGROUND] > 0.5 and _circle_rides_rect(state, cfg):
            support_vx = state[S_RVX]
        grounded = state[S_CGROUND] > 0.5
        r = cfg[C_RADIUS]
        accel = cfg[C_ROLL_ACCEL]
        vmax = cfg[C_MAX_ROLL]
        wcap = vmax / r
        if ca == A_ROLL_RIGHT:
            w = state[S_COMEGA]
            if w < wcap:
                state[S_COMEGA] = min(wcap, w + (accel / r) * dt)
            if grounded:
                rel = state[S_CVX] - support_vx
                if rel < vmax:
                    state[S_CVX] = min(vmax, rel + accel * dt) + support_vx
        elif ca == A_ROLL_LEFT:
            w = state[S_COMEGA]
            if w > -wcap:
                state[S_COMEGA] = max(-wcap, w - (accel / r) * dt)
            if grounded:
                rel = state[S_CVX] - support_vx
                if rel > -vmax:
                    state[S_CVX] = max(-vmax, rel - accel * dt) + support_vx
        else:
            # no drive: rolling resistance, ground contact only
            if grounded:
                rel = state[S_CVX] - support_vx
                dec = cfg[C_ROLL_RESIST] * dt
                if rel > dec:
                    rel -= dec
                elif rel < -dec:
                    rel += dec
                else:
                    rel = 0.0
                state[S_CVX] = rel + support_vx
                w = state[S_COMEGA]
                wdec = (cfg[C_ROLL_RESIST] / r) * dt
                if w > wdec:
                    w -= wdec
                elif w < -wdec:
                    w += wdec
                else:
                    w = 0.0
                state[S_COMEGA] = w
        if grounded:
            # spin-velocity coupling drags ground speed toward the rolling speed
            rel = state[S_CVX] - support_vx
            state[S_CVX] += cfg[C_SPIN_COUPLE] * (state[S_COMEGA] * r - rel) * dt
        if ca == A_JUMP and grounded:
            state[S_CVY] = -cfg[C_JUMP_SPEED]

    if has_rect != 0:
        grounded_r = state[S_RGROUND] > 0.5
        if ra == A_SLIDE_RIGHT:
            v = state[S_RVX]
            if v < cfg[C_MAX_SLIDE]:
                state[S_RVX] = min(cfg[C_MAX_SLIDE], v + cfg[C_SLIDE_ACCEL] * dt)
        elif ra == A_SLIDE_LEFT:
            v = state[S_RVX]
            if v > -cfg[C_MAX_SLIDE]:
                state[S_RVX] = max(-cfg[C_MAX_SLIDE], v - cfg[C_SLIDE_ACCEL] * dt)
        elif ra == A_MORPH_UP:
            state[S_RH] = min(cfg[C_HMAX], state[S_RH] + cfg[C_MORPH_RATE] * dt)
        elif ra == A_MORPH_DOWN:
            state[S_RH] = max(cfg[C_HMIN], state[S_RH] - cfg[C_MORPH_RATE] * dt)
        else:
            if grounded_r:
                v = state[S_RVX]
                dec = cfg[C_FRICTION] * dt
                if v > dec:
                    v -= dec
                elif v < -dec:
                    v += dec
                else:
                    v = 0.0
                state[S_RVX] = v

    g = cfg[C_GRAVITY] * dt
    if has_circle != 0:
        state[S_CVY] += g
    if has_rect != 0:
        state[S_RVY] += g

    std = cfg[C_NOISE_STD]
    if std > 0.0:
        if has_circle != 0:
            z0, z1 = _noise_pair(seed, tick, 0)
            state[S_CVX] += std * z0
            state[S_CVY] += std * z1
        if has_rect != 0:
            z2, z3 = _noise_pair(seed, tick, 1)
            state[S_RVX] += std * z2
            state[S_RVY] += std * z3

    if has_circle != 0:
        state[S_CX] += state[S_CVX] * dt
        state[S_CY] += state[S_CVY] * dt
    if has_rect != 0:
        state[S_RX] += state[S_RVX] * dt
        state[S_RY] += state[S_RVY] * dt

    _resolve_all(state, plats, cfg, has_circle, has_rect)
    return _collect(state, diamonds, cfg, has_circle, has_rect)


@njit(cache=True)
def _rollout_core(state, diamonds, plats, cfg, script, nticks, has_circle, has_rect, seed, tick0):
    """Run nticks of scripted stepping; returns the tick after which every
    diamond was collected, or -1 if some remain."""
    done = np.int64(-1)
    ndiam = diamonds.shape[0]
    for k in range(nticks):
        _step_core(
            state, diamonds, plats, cfg,
            script[k, 0], script[k, 1],
            has_circle, has_rect, seed, tick0 + k,
        )
        if done < 0:
            remaining = 0
            for i in range(ndiam):
                if diamonds[i, 2] == 0.0:
                    remaining += 1
                    break
            if remaining == 0:
                done = tick0 + k + 1
    return done
