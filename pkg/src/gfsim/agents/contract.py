"""What an agent sees and how it talks back.

Agents never touch the world directly: each tick they receive a sensor
snapshot, may exchange short byte messages with their partner (delivered
one tick later), and answer with a single action.  Angular velocity is
deliberately absent from the circle's sensors; agents that want it must
estimate it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..config import Config
from ..levels.model import LevelSpec
from ..world.types import Action, WorldState

MAX_MESSAGE_BYTES = 4096


class Role(enum.Enum):
    Circle = "circle"
    Rectangle = "rectangle"

    @property
    def partner(self) -> "Role":
        return Role.Rectangle if self is Role.Circle else Role.Circle


@dataclass(frozen=True)
class Message:
    sender: Role
    payload: bytes


@dataclass(frozen=True)
class CircleSensors:
    x: float
    y: float
    vx: float
    vy: float
    grounded: bool


@dataclass(frozen=True)
class RectangleSensors:
    x: float
    y: float
    vx: float
    vy: float
    height: float
    grounded: bool


@dataclass(frozen=True)
class SensorSnapshot:
    """Per-tick view of the world: own state, partner state, what is left."""

    tick: int
    elapsed: float
    time_limit: float
    circle: CircleSensors | None
    rectangle: RectangleSensors | None
    diamonds: tuple[tuple[float, float], ...]  # uncaught only
    collected: int

    @property
    def remaining(self) -> float:
        return self.time_limit - self.elapsed


def snapshot_from_world(world: WorldState, level: LevelSpec, cfg: Config) -> SensorSnapshot:
    c = None
    if world.circle is not None:
        s = world.circle
        c = CircleSensors(x=s.x, y=s.y, vx=s.vx, vy=s.vy, grounded=s.grounded)
    r = None
    if world.rectangle is not None:
        s = world.rectangle
        r = RectangleSensors(x=s.x, y=s.y, vx=s.vx, vy=s.vy, height=s.height,
                             grounded=s.grounded)
    uncaught = tuple((d.x, d.y) for d in world.diamonds if not d.collected)
    return SensorSnapshot(
        tick=world.tick,
        elapsed=world.tick * cfg.physics.dt,
        time_limit=level.time_limit,
        circle=c,
        rectangle=r,
        diamonds=uncaught,
        collected=len(world.diamonds) - len(uncaught),
    )


@dataclass(frozen=True)
class SetupInfo:
    """Everything an agent gets before the first tick."""

    role: Role
    level: LevelSpec
    cfg: Config
    seed: int
    partner_present: bool


class Agent:
    """Base class for players.  Override the four callbacks.

    The runtime calls, per tick and in this order: ``handle_messages`` with
    whatever the partner sent last tick, ``sensors_update``, ``update``,
    then ``get_action``.  ``get_action`` has a soft wall-clock budget; late
    answers count against the run and may be replaced with NoAction in
    real-time sessions.
    """

    def __init__(self) -> None:
        self._outbox: list[bytes] = []

    def setup(self, info: SetupInfo) -> None:
        pass

    def handle_messages(self, messages: list[Message]) -> None:
        pass

    def sensors_update(self, snapshot: SensorSnapshot) -> None:
        pass

    def update(self) -> None:
        pass

    def get_action(self) -> Action | None:
        return None

    def send_message(self, payload: bytes) -> None:
        """Queue a message for the partner; it arrives next tick."""
        if not isinstance(payload, bytes):
            raise TypeError("message payload must be bytes")
        self._outbox.append(payload)

    def drain_outbox(self) -> list[bytes]:
        out = self._outbox
        self._outbox = []
        return out


@dataclass
class AgentEvent:
    """Something noteworthy an agent did this tick (for the run log)."""

    tick: int
    role: Role
    kind: str  # timeout | panic | bad_action | oversize_message
    detail: str = ""


@dataclass
class TickResult:
    circle_action: Action | None
    rect_action: Action | None
    sent: list[Message] = field(default_factory=list)
    events: list[AgentEvent] = field(default_factory=list)
