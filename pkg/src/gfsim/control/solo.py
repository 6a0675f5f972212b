"""Built-in single-character agent.

Planning happens once at setup: build the verified nav graph, prove which
diamonds are collectible, and lay out a cheapest tour.  Execution is a
queue of runners, one per tour step.  A failed runner triggers a replan
from wherever the character actually is, and diamonds the graph cannot
route to get one tree-search attempt straight on the forward model before
being abandoned.
"""

from __future__ import annotations

from ..agents.contract import Agent, Role, SensorSnapshot, SetupInfo
from ..config import Config
from ..levels.model import LevelSpec
from ..nav.coop import solo_tasks
from ..nav.execute import (
    DONE,
    FAILED,
    CharView,
    CollectRunner,
    EdgeRunner,
    view_from_sensors,
)
from ..nav.graph import NavGraph, build_graph
from ..nav.rrt import rrt_to_diamond
from ..nav.search import CollectTask, TourStep, plan_tour, route
from ..nav.surfaces import surface_below
from ..world.engine import ArrayWorld
from ..world.types import (
    Action,
    CircleState,
    DiamondState,
    RectangleState,
    WorldState,
)

STUCK_TICKS = 150
MAX_REPLANS = 12


def world_from_sensors(level: LevelSpec, cfg: Config,
                       snap: SensorSnapshot) -> WorldState:
    """Rebuild a steppable world from what the sensors expose.

    The circle's spin is hidden from agents, so it is estimated from the
    rolling contact; good enough for short lookahead planning.
    """
    r = cfg.physics.circle_radius
    circle = None
    if snap.circle is not None:
        c = snap.circle
        circle = CircleState(x=c.x, y=c.y, vx=c.vx, vy=c.vy,
                             angular_velocity=c.vx / r, grounded=c.grounded)
    rect = None
    if snap.rectangle is not None:
        q = snap.rectangle
        rect = RectangleState(x=q.x, y=q.y, vx=q.vx, vy=q.vy, height=q.height,
                              grounded=q.grounded)
    uncaught = set(snap.diamonds)
    diamonds = tuple(
        DiamondState(x=d.x, y=d.y, collected=(d.x, d.y) not in uncaught)
        for d in level.diamonds
    )
    return WorldState(tick=snap.tick, circle=circle, rectangle=rect,
                      diamonds=diamonds)


class NavPilot:
    """Tour executor for one character; the brains behind the solo agents."""

    def __init__(self, role: Role, level: LevelSpec, cfg: Config, seed: int,
                 graph: NavGraph | None = None,
                 tasks: dict[int, CollectTask] | None = None):
        self.role = role
        self.level = level
        self.cfg = cfg
        self.phys = cfg.physics
        self.seed = seed
        self.graph = graph if graph is not None else build_graph(level, cfg, role)
        self.tasks = tasks if tasks is not None else solo_tasks(level, cfg, self.graph, role)
        self.targets = set(self.tasks)        # diamond indices we will chase
        self.rrt_pool = set(range(len(level.diamonds)))  # fallback eligibility
        self.queue: list = []                 # pending TourSteps
        self.runner = None
        self.runner_step = None
        self.script: list[Action] = []        # open-loop tail from tree search
        self.tried_rrt: set[int] = set()
        self.replans = 0
        self._last_x: float | None = None
        self._still = 0
        self._planned = False

    # -- helpers ----------------------------------------------------------

    def _own(self, snap: SensorSnapshot):
        return snap.circle if self.role is Role.Circle else snap.rectangle

    def _caught(self, snap: SensorSnapshot, di: int) -> bool:
        d = self.level.diamonds[di]
        return (d.x, d.y) not in set(snap.diamonds)

    def _uncaught_targets(self, snap: SensorSnapshot) -> list[int]:
        return [di for di in sorted(self.targets) if not self._caught(snap, di)]

    def current_node(self, me: CharView) -> int | None:
        surfaces = [n.surface for n in self.graph.nodes]
        s = surface_below(surfaces, me.x, me.standing_y(self.phys, self.role))
        return s.index if s is not None else None

    def _retour(self, snap: SensorSnapshot, me: CharView) -> bool:
        """Rebuild the step queue from the current position."""
        self.queue = []
        self.runner = None
        self.runner_step = None
        node = self.current_node(me)
        if node is None:
            return False
        remaining = [self.tasks[di] for di in self._uncaught_targets(snap)
                     if di in self.tasks]
        tour = plan_tour(self.graph, node, remaining)
        self.queue = list(tour.steps)
        return True

    def goto(self, node: int, snap: SensorSnapshot, me: CharView) -> bool:
        """Replace the queue with a plain travel plan to `node`."""
        self.queue = []
        self.runner = None
        self.runner_step = None
        self._planned = True
        cur = self.current_node(me)
        if cur is None:
            return False
        if cur == node:
            return True
        edges = route(self.graph, cur, node)
        if edges is None:
            return False
        self.queue = [TourStep("travel", edge=e) for e in edges]
        return True

    @property
    def idle(self) -> bool:
        return not self.queue and self.runner is None and not self.script

    def resweep(self, snap: SensorSnapshot, me: CharView) -> None:
        """Late-game fallback: chase anything self-reachable that is left."""
        self.targets = set(self.tasks)
        self.rrt_pool = set(range(len(self.level.diamonds)))
        self.tried_rrt.clear()
        self.replans = 0
        self._planned = True
        self._retour(snap, me)

    def _start_runner(self, step) -> None:
        if step.kind == "travel":
            e = step.edge
            src = self.graph.nodes[e.src].surface
            dst = self.graph.nodes[e.dst].surface
            self.runner = EdgeRunner(self.role, self.phys, e.hint, src, dst)
        else:
            t = step.task
            s = self.graph.nodes[t.node].surface
            self.runner = CollectRunner(self.role, self.phys, t.hint, s)
        self.runner_step = step

    def _try_rrt(self, snap: SensorSnapshot) -> bool:
        """One forward-model tree search for the next stranded diamond."""
        pool = [di for di in sorted(self.rrt_pool) if not self._caught(snap, di)]
        for di in pool:
            if di in self.tried_rrt:
                continue
            self.tried_rrt.add(di)
            aw = ArrayWorld(self.level, self.cfg, seed=self.seed)
            aw.load(world_from_sensors(self.level, self.cfg, snap))
            res = rrt_to_diamond(aw, self.role, di, seed=self.seed * 1009 + di,
                                 max_iters=300)
            if res.reached and res.script:
                self.script = list(res.script)
                return True
        return False

    # -- main entry -------------------------------------------------------

    def step(self, snap: SensorSnapshot) -> Action | None:
        own = self._own(snap)
        if own is None:
            return None
        me = view_from_sensors(own)

        if self.script:
            return self.script.pop(0)

        if not self._planned:
            self._planned = True
            self._retour(snap, me)

        # stall watchdog: runners should always be moving us somewhere
        if self.runner is not None and me.grounded:
            if self._last_x is not None and abs(me.x - self._last_x) < 1.0:
                self._still += 1
            else:
                self._still = 0
            self._last_x = me.x
            if self._still > STUCK_TICKS:
                self._still = 0
                self.runner = None
                self.runner_step = None
                if self.replans < MAX_REPLANS:
                    self.replans += 1
                    self._retour(snap, me)

        while True:
            if self.runner is None:
                if not self.queue:
                    break
                self._start_runner(self.queue.pop(0))

            if isinstance(self.runner, CollectRunner):
                caught = self._caught(snap, self.runner_step.task.diamond)
                action, status = self.runner.next_action(me, caught)
            else:
                action, status = self.runner.next_action(me)

            if status == DONE:
                self.runner = None
                self.runner_step = None
                continue
            if status == FAILED:
                self.runner = None
                self.runner_step = None
                if self.replans < MAX_REPLANS and me.grounded:
                    self.replans += 1
                    self._retour(snap, me)
                    continue
                break
            return action

        # queue drained: anything left gets one model-based attempt
        if me.grounded and self._try_rrt(snap) and self.script:
            return self.script.pop(0)
        return None


class _SoloAgent(Agent):
    role: Role

    def __init__(self) -> None:
        super().__init__()
        self.pilot: NavPilot | None = None
        self._snap: SensorSnapshot | None = None
        self._action: Action | None = None

    def setup(self, info: SetupInfo) -> None:
        self.pilot = NavPilot(self.role, info.level, info.cfg, info.seed)

    def sensors_update(self, snapshot: SensorSnapshot) -> None:
        self._snap = snapshot

    def update(self) -> None:
        if self.pilot is None or self._snap is None:
            self._action = None
            return
        self._action = self.pilot.step(self._snap)

    def get_action(self) -> Action | None:
        return self._action


class SoloCircleAgent(_SoloAgent):
    role = Role.Circle


class SoloRectAgent(_SoloAgent):
    role = Role.Rectangle


class IdleAgent(Agent):
    """Does nothing; useful as a stand-in partner."""
