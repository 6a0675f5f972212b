"""Cooperative pair: independent solo work, then stack-and-lift pickups.

Both sides run the same deterministic setup (graphs, reachability,
assignment), so they agree on the division of labour without negotiating.
Messages carry only runtime synchronization for the riding protocol:

    R:k  carrier parked low under diamond k, ready to be boarded
    M:k  rider standing on the carrier's top
    L:k  carrier at lift height
    C:k  diamond k caught, stand down
    X:k  abandon diamond k (timeout or too many failed attempts)

Solo-mode diamonds are split by verified pickup cost; ties go to the
rectangle.  After the coop queue drains, both sides sweep whatever is
left through their solo machinery, so a dead partner degrades the run
instead of ending it.
"""

from __future__ import annotations

from ..agents.contract import (
    Agent,
    Message,
    RectangleSensors,
    Role,
    SensorSnapshot,
    SetupInfo,
)
from ..config import Config, PhysicsConfig
from ..nav.coop import (
    MODE_CIRCLE,
    MODE_COOP,
    MODE_EITHER,
    MODE_RECT,
    CoopPlanItem,
    classify,
    solo_tasks,
)
from ..nav.execute import CharView, takeoff_speed, view_from_sensors
from ..nav.graph import _landing_time, build_graph
from .motion import VelocityController, braking_speed, morph_toward
from ..world.types import Action
from .solo import NavPilot

PHASE_TIMEOUT = 900          # ticks before a stuck handshake is abandoned
AWAIT_TIMEOUT = 3600         # carrier patience for a rider that never shows
RESEND_EVERY = 30
MOUNT_RETRIES = 3
PARK_X_TOL = 6.0
PARK_V_TOL = 8.0


def _msg(kind: str, k: int) -> bytes:
    return f"{kind}:{k}".encode("ascii")


def _parse(payload: bytes) -> tuple[str, int] | None:
    try:
        kind, _, num = payload.decode("ascii").partition(":")
        if kind in ("G", "R", "M", "L", "C", "X") and num.isdigit():
            return kind, int(num)
    except UnicodeDecodeError:
        pass
    return None


def _divide(level, cfg: Config):
    """Deterministic task division both sides compute identically."""
    cgraph = build_graph(level, cfg, Role.Circle)
    rgraph = build_graph(level, cfg, Role.Rectangle)
    ctasks = solo_tasks(level, cfg, cgraph, Role.Circle)
    rtasks = solo_tasks(level, cfg, rgraph, Role.Rectangle)
    assignments = classify(level, cfg, cgraph, rgraph, ctasks, rtasks)

    circle_set: set[int] = set()
    rect_set: set[int] = set()
    coop: list[CoopPlanItem] = []
    for a in assignments:
        if a.mode == MODE_CIRCLE:
            circle_set.add(a.diamond)
        elif a.mode == MODE_RECT:
            rect_set.add(a.diamond)
        elif a.mode == MODE_EITHER:
            if a.circle.cost < a.rect.cost:
                circle_set.add(a.diamond)
            else:
                rect_set.add(a.diamond)
        elif a.mode == MODE_COOP and a.coop is not None:
            coop.append(a.coop)
    coop.sort(key=lambda it: (it.est_cost, it.diamond))
    return cgraph, rgraph, ctasks, rtasks, circle_set, rect_set, coop


def _rect_half_width(q: RectangleSensors, phys: PhysicsConfig) -> float:
    return 0.5 * phys.rect_area / q.height


def _on_top(me: CharView, q: RectangleSensors, phys: PhysicsConfig) -> bool:
    top = q.y - 0.5 * q.height
    standing = me.y + phys.circle_radius
    return (abs(standing - top) <= 4.0
            and abs(me.x - q.x) <= _rect_half_width(q, phys) + 6.0)


class _PairBase(Agent):
    role: Role

    def __init__(self) -> None:
        super().__init__()
        self.pilot: NavPilot | None = None
        self.coop_queue: list[CoopPlanItem] = []
        self.item: CoopPlanItem | None = None
        self.state = "solo"
        self.phase_start = 0
        self.last_sent = -10_000
        self.got: dict[str, int] = {}          # msg kind -> tick received
        self.dead: set[int] = set()            # diamonds a side gave up on
        self.tries: dict[int, int] = {}        # failed attempts per diamond
        self.mount_tries = 0
        self.swept = False
        self._went = False
        self._snap: SensorSnapshot | None = None
        self._action: Action | None = None
        self.vc = VelocityController()

    # -- plumbing ---------------------------------------------------------

    def setup(self, info: SetupInfo) -> None:
        self.level = info.level
        self.cfg = info.cfg
        self.phys = info.cfg.physics
        cg, rg, ct, rt, cset, rset, coop = _divide(info.level, info.cfg)
        if self.role is Role.Circle:
            self.pilot = NavPilot(self.role, info.level, info.cfg, info.seed,
                                  graph=cg, tasks=ct)
            self.pilot.targets = cset
            self.pilot.rrt_pool = set(cset)
        else:
            self.pilot = NavPilot(self.role, info.level, info.cfg, info.seed,
                                  graph=rg, tasks=rt)
            self.pilot.targets = rset
            self.pilot.rrt_pool = set(rset)
        self.coop_queue = coop if info.partner_present else []

    def handle_messages(self, messages: list[Message]) -> None:
        for m in messages:
            parsed = _parse(m.payload)
            if parsed is None:
                continue
            kind, k = parsed
            if kind == "X":
                self.dead.add(k)
            if self.item is not None and k == self.item.diamond:
                self.got[kind] = self._snap.tick if self._snap else 0

    def sensors_update(self, snapshot: SensorSnapshot) -> None:
        self._snap = snapshot

    def get_action(self) -> Action | None:
        return self._action

    # -- shared machinery -------------------------------------------------

    def _me(self) -> CharView | None:
        own = self._snap.circle if self.role is Role.Circle else self._snap.rectangle
        return None if own is None else view_from_sensors(own)

    def _caught(self, di: int) -> bool:
        d = self.level.diamonds[di]
        return (d.x, d.y) not in set(self._snap.diamonds)

    def _send_throttled(self, kind: str) -> None:
        t = self._snap.tick
        if t - self.last_sent >= RESEND_EVERY:
            self.last_sent = t
            self.send_message(_msg(kind, self.item.diamond))

    def _enter(self, state: str) -> None:
        self.state = state
        self.phase_start = self._snap.tick
        self.vc.reset()

    def _phase_expired(self) -> bool:
        return self._snap.tick - self.phase_start > PHASE_TIMEOUT

    def _start_next_item(self) -> None:
        self.item = None
        self.got = {}
        self.mount_tries = 0
        self._went = False
        while self.coop_queue:
            it = self.coop_queue.pop(0)
            if it.diamond not in self.dead and not self._caught(it.diamond):
                self.item = it
                break
        if self.item is not None:
            self._enter(self._entry_state())
        else:
            self._enter("sweep")

    def _entry_state(self) -> str:
        return "go"

    def _abandon(self) -> None:
        di = self.item.diamond
        n = self.tries.get(di, 0) + 1
        self.tries[di] = n
        if n <= 1 and di not in self.dead:
            # one silent retry: a blocked approach is usually transient
            self.coop_queue.append(self.item)
        else:
            self.dead.add(di)
            self.send_message(_msg("X", di))
        self._after_item()

    def _after_item(self) -> None:
        raise NotImplementedError

    def _drive_to(self, me: CharView, x: float, vmax: float, accel: float):
        vdes = braking_speed(me.x, x, 0.0, vmax, accel)
        return self.vc.direction(me.vx, vdes, self.phys.dt)

    def update(self) -> None:
        if self.pilot is None or self._snap is None:
            self._action = None
            return
        me = self._me()
        if me is None:
            self._action = None
            return
        if self.item is not None and self.state not in ("lower", "dismount"):
            if self._caught(self.item.diamond):
                self.send_message(_msg("C", self.item.diamond))
                self._on_caught()
            elif self.item.diamond in self.dead:
                self._after_item()
        self._action = self._step(me)

    def _on_caught(self) -> None:
        raise NotImplementedError

    def _step(self, me: CharView) -> Action | None:
        raise NotImplementedError

    def _solo_or_advance(self, me: CharView) -> Action | None:
        a = self.pilot.step(self._snap)
        if a is None and self.pilot.idle:
            if self.coop_queue:
                self._start_next_item()
            elif not self.swept:
                self.swept = True
                self.pilot.resweep(self._snap, me)
                self._enter("sweep")
        return a

    def _sweep(self, me: CharView) -> Action | None:
        if not self.swept:
            self.swept = True
            self.pilot.resweep(self._snap, me)
        return self.pilot.step(self._snap)


class CoopRectAgent(_PairBase):
    """Carrier side: park under the diamond, lift the rider, stand down."""

    role = Role.Rectangle

    def _after_item(self) -> None:
        self._enter("lower")

    def _on_caught(self) -> None:
        self._enter("lower")

    def _entry_state(self) -> str:
        # parking early puts a wall across the rider's solo routes; stay
        # put until the rider says it is on its way
        return "await"

    def _step(self, me: CharView) -> Action | None:
        s = self.state
        snap = self._snap
        phys = self.phys

        if s == "solo":
            return self._solo_or_advance(me)
        if s == "sweep":
            return self._sweep(me)

        if s == "await":
            if self._snap.tick - self.phase_start > AWAIT_TIMEOUT:
                self._abandon()
                return None
            if "G" in self.got:
                self._enter("go")
            return None

        if s == "go":
            if not self._went:
                self._went = True
                if not self.pilot.goto(self.item.carrier_node, snap, me):
                    self._abandon()
                    return None
            a = self.pilot.step(snap)
            if a is None and self.pilot.idle:
                self._enter("park")
            return a

        if s == "park":
            if self._phase_expired():
                self._abandon()
                return None
            off = abs(me.x - self.item.park_x)
            if off > PARK_X_TOL or abs(me.vx) > PARK_V_TOL:
                d = self._drive_to(me, self.item.park_x, phys.max_slide_speed,
                                   phys.slide_accel)
                return Action.SlideRight if d > 0 else Action.SlideLeft if d < 0 else None
            m = morph_toward(me.height, phys.h_min, phys)
            if m is not None:
                return m
            self._enter("ready")
            return None

        if s == "ready":
            if self._phase_expired():
                self._abandon()
                return None
            if "M" in self.got:
                self._enter("lift")
                return None
            self._send_throttled("R")
            m = morph_toward(me.height, phys.h_min, phys)
            if m is not None:
                return m
            if abs(me.x - self.item.park_x) > PARK_X_TOL:
                d = self._drive_to(me, self.item.park_x, 60.0, phys.slide_accel)
                return Action.SlideRight if d > 0 else Action.SlideLeft if d < 0 else None
            return None

        if s == "lift":
            if self._phase_expired():
                self._abandon()
                return None
            # the rider's catch geometry needs the top centered on park_x,
            # so station-keeping outranks morph progress
            off = me.x - self.item.park_x
            if abs(off) > 4.0 and snap.tick % 2 == 0:
                d = self._drive_to(me, self.item.park_x, 40.0, phys.slide_accel)
                if d:
                    return Action.SlideRight if d > 0 else Action.SlideLeft
            m = morph_toward(me.height, self.item.lift_height, phys)
            if m is not None:
                return m
            if abs(off) > 8.0:
                d = self._drive_to(me, self.item.park_x, 40.0, phys.slide_accel)
                if d:
                    return Action.SlideRight if d > 0 else Action.SlideLeft
            self._send_throttled("L")
            return None

        if s == "lower":
            circle = snap.circle
            rider_clear = True
            if circle is not None:
                rider = view_from_sensors(circle)
                rider_clear = not _on_top(rider, snap.rectangle, phys)
            if rider_clear or self._phase_expired():
                h0 = min(max(phys.rect_area ** 0.5, phys.h_min), phys.h_max)
                m = morph_toward(me.height, h0, phys)
                if m is not None:
                    return m
                self._start_next_item()
            return None

        return None


class CoopCircleAgent(_PairBase):
    """Rider side: board the parked carrier, ride the lift, take the catch."""

    role = Role.Circle

    def __init__(self) -> None:
        super().__init__()
        self.mount_x = 0.0

    def _after_item(self) -> None:
        self._enter("dismount")

    def _on_caught(self) -> None:
        self._enter("dismount")

    def _mount_side(self) -> int:
        return -1 if self.mount_x < self.item.park_x else 1

    def _pick_mount(self, me: CharView) -> int:
        """Board from the side we approach on, or the carrier shoves us around.

        Only this side reads mount_x, so flipping it needs no agreement.
        """
        it = self.item
        self.mount_x = it.mount_x
        mirror = 2.0 * it.park_x - it.mount_x
        if (me.x - it.park_x) * (it.mount_x - it.park_x) < 0.0:
            s = self.pilot.graph.nodes[it.mount_node].surface
            if abs(s.clamp_x(mirror, 2.0) - mirror) < 1.0:
                self.mount_x = mirror
        return it.mount_node

    def _step(self, me: CharView) -> Action | None:
        s = self.state
        snap = self._snap
        phys = self.phys
        q = snap.rectangle

        if s == "solo":
            return self._solo_or_advance(me)
        if s == "sweep":
            return self._sweep(me)

        if q is None:
            # partner gone: nothing cooperative is possible any more
            self.coop_queue = []
            self._enter("sweep")
            return None

        if s == "go":
            if not self._went:
                self._went = True
                if not self.pilot.goto(self._pick_mount(me), snap, me):
                    self._abandon()
                    return None
            self._send_throttled("G")
            a = self.pilot.step(snap)
            if a is None and self.pilot.idle:
                self._enter("hold")
            return a

        if s == "hold":
            if self._phase_expired():
                self._abandon()
                return None
            self._send_throttled("G")
            if "R" in self.got:
                self._enter("mount")
                return None
            # carrier still inbound through our side: get out of its lane,
            # preferably by boarding from the far side instead
            hx = self.mount_x
            side = 1 if self.mount_x >= self.item.park_x else -1
            dq = q.x - self.item.park_x
            if dq * side > 0 and abs(dq) + 4.0 > abs(self.mount_x - self.item.park_x):
                mirror = 2.0 * self.item.park_x - self.mount_x
                s2 = self.pilot.graph.nodes[self.item.mount_node].surface
                if abs(s2.clamp_x(mirror, 2.0) - mirror) < 1.0:
                    self.mount_x = hx = mirror
                else:
                    hx = q.x + side * (_rect_half_width(q, phys)
                                       + phys.circle_radius + 12.0)
            d = self._drive_to(me, hx, phys.max_roll_speed, phys.roll_accel)
            return Action.RollRight if d > 0 else Action.RollLeft if d < 0 else None

        if s == "mount":
            if self._phase_expired():
                self._abandon()
                return None
            top = q.y - 0.5 * q.height
            rise = (me.y + phys.circle_radius) - top
            t_land = _landing_time(phys.jump_speed, phys.gravity, rise)
            if t_land is None:
                self._abandon()
                return None
            vx_need = (q.x - self.mount_x) / t_land
            vx_need = max(-140.0, min(140.0, vx_need))
            window = max(6.0, abs(vx_need) * phys.dt * 2.0 + 2.0)
            if (me.grounded and abs(me.x - self.mount_x) <= window
                    and abs(me.vx - vx_need) <= 30.0):
                self._enter("mount_fly")
                return Action.Jump
            vdes = takeoff_speed(me, self.mount_x, vx_need,
                                 phys.max_roll_speed, phys.roll_accel)
            d = self.vc.direction(me.vx, vdes, phys.dt)
            return Action.RollRight if d > 0 else Action.RollLeft if d < 0 else None

        if s == "mount_fly":
            if not me.grounded:
                return None
            if _on_top(me, q, phys):
                self._enter("riding")
                return None
            self.mount_tries += 1
            if self.mount_tries > MOUNT_RETRIES:
                self._abandon()
                return None
            self._enter("mount")
            return None

        if s == "riding":
            if self._phase_expired():
                self._abandon()
                return None
            self._send_throttled("M")
            if "L" in self.got:
                self._enter("catch")
                return None
            return self._track_carrier(me, q)

        if s == "catch":
            if self._phase_expired():
                self._abandon()
                return None
            d = self.level.diamonds[self.item.diamond]
            if not self.item.jump_from_top:
                err = d.x - me.x
                if abs(err) > 8.0:
                    return Action.RollRight if err > 0 else Action.RollLeft
                return None
            if not me.grounded:
                return None
            if not _on_top(me, q, phys):
                self.mount_tries += 1
                if self.mount_tries > MOUNT_RETRIES:
                    self._abandon()
                else:
                    self._enter("mount")
                return None
            err = d.x - me.x
            if abs(err) > 6.0 or abs(me.vx) > 20.0:
                dd = self._drive_to(me, d.x, 50.0, phys.roll_accel)
                return Action.RollRight if dd > 0 else Action.RollLeft if dd < 0 else None
            return Action.Jump

        if s == "dismount":
            if _on_top(me, q, phys):
                # roll back off the side we boarded from; it is known ground
                side = self._mount_side()
                return Action.RollRight if side > 0 else Action.RollLeft
            if me.grounded:
                self._start_next_item()
            return None

        return None

    def _track_carrier(self, me: CharView, q: RectangleSensors) -> Action | None:
        # proportional with braking; bang-bang surfs off the narrowing top
        vdes = braking_speed(me.x, q.x, 0.0, 50.0, self.phys.roll_accel)
        d = self.vc.direction(me.vx, vdes, self.phys.dt)
        return Action.RollRight if d > 0 else Action.RollLeft if d < 0 else None
