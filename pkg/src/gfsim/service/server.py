"""Live session server.

One simulation loop per session, whatever the client count.  Clients talk
over a websocket at ``/ws``: first message is a hello claiming a role, then
frames flow out and inputs flow in, all newline-free single-line JSON (see
frames.py for the schema).

Human input is a mailbox with latest-wins semantics: the most recent legal
input per role is held and applied every tick until replaced, which is what
makes a single key press behave like a held force.  Slow spectators get
frames dropped (oldest first), never a stalled loop.
"""

from __future__ import annotations

import asyncio
import contextlib
import os

from ..agents.contract import Role, SetupInfo, snapshot_from_world
from ..agents.registry import UnknownAgent, create
from ..agents.replay import Replay, ReplayError, load_replay
from ..agents.runtime import TickDriver
from ..config import Config
from ..levels.model import LevelSpec
from ..levels.packs import load_bundled_pack
from ..levels.textio import load_level, serialize_level
from ..world.engine import ArrayWorld
from ..world.types import Action
from .frames import (
    Control,
    Frame,
    Hello,
    Input,
    ProtocolError,
    decode_client,
    encode_control,
    encode_error,
    encode_frame,
    frame_from_state,
)

STALE_TICKS = 30          # inputs tagged older than this are dropped
QUEUE_FRAMES = 240        # per-client backlog before drop-oldest kicks in
SPEED_MIN, SPEED_MAX = 0.05, 64.0

_LEGAL = {
    Role.Circle: {Action.NoAction, Action.Jump, Action.RollLeft, Action.RollRight},
    Role.Rectangle: {Action.NoAction, Action.SlideLeft, Action.SlideRight,
                     Action.MorphUp, Action.MorphDown},
}


class ServiceError(Exception):
    """Session cannot be built as asked (bad controller spec, level mismatch)."""


def vet_input(tag: int, now: int) -> str:
    """Arrival-time check of an input's claimed tick: ok, stale, or future."""
    if tag > now:
        return "future"
    if now - tag > STALE_TICKS:
        return "stale"
    return "ok"


def apply_human_input(held: dict[Role, Action | None],
                      roles: tuple[Role, ...]) -> dict[Role, Action | None]:
    """Actions for this tick from the mailbox; absent input means NoAction."""
    return {role: held.get(role) for role in roles}


def _parse_controller(spec: str | None) -> tuple[str, str | None]:
    if spec is None:
        return "none", None
    if spec == "human":
        return "human", None
    if spec.startswith("agent:") and len(spec) > 6:
        return "agent", spec[6:]
    raise ServiceError("controller must be 'human' or 'agent:NAME', got %r" % spec)


class Session:
    """World, its single loop, and the mailboxes the socket handlers feed."""

    def __init__(self, level: LevelSpec, cfg: Config,
                 circle: str | None = "human", rect: str | None = None,
                 seed: int = 0, speed: float = 1.0):
        self.cfg = cfg
        self.seed = seed
        self.speed = speed
        self.paused = False
        self.closed = False
        self.done = False
        self.stale_dropped = 0
        self.dropped_frames = 0
        self.held: dict[Role, Action | None] = {}
        self.human_roles: set[Role] = set()
        self.players: dict[Role, object] = {}
        self.clients: dict[object, asyncio.Queue] = {}
        self._specs = {Role.Circle: _parse_controller(circle),
                       Role.Rectangle: _parse_controller(rect)}
        self._replay_lines: list[str] | None = None
        self._replay_end: str | None = None
        self._wake = asyncio.Event()
        self._load(level)

    # -- world lifecycle -----------------------------------------------------

    def _load(self, level: LevelSpec) -> None:
        roles = []
        if level.has_circle:
            roles.append(Role.Circle)
        if level.has_rectangle:
            roles.append(Role.Rectangle)
        for role in (Role.Circle, Role.Rectangle):
            kind, _ = self._specs[role]
            if kind != "none" and role not in roles:
                raise ServiceError("level %r has no %s to control"
                                   % (level.name, role.value))

        driver = TickDriver()
        agents = {}
        for role in roles:
            kind, name = self._specs[role]
            if kind == "agent":
                try:
                    agents[role] = create(name, role, level, self.cfg, self.seed)
                except UnknownAgent as exc:
                    raise ServiceError(str(exc)) from exc
        for role, agent in agents.items():
            driver.add_agent(role, agent)
        driver.setup({role: SetupInfo(role=role, level=level, cfg=self.cfg,
                                      seed=self.seed,
                                      partner_present=len(roles) == 2)
                      for role in agents})

        self.level = level
        self.roles = tuple(roles)
        self.human_roles = {r for r in roles if self._specs[r][0] == "human"}
        self.held = {r: None for r in self.human_roles}
        self.driver = driver
        self.world = ArrayWorld(level, self.cfg, seed=self.seed)
        self.max_ticks = int(round(level.time_limit / self.cfg.physics.dt))
        self.done = False

    def load_level(self, level: LevelSpec) -> None:
        self.driver.close()
        self._load(level)
        self.broadcast(encode_control("level", serialize_level(self.level)))
        self.broadcast(encode_frame(self.snapshot_frame()))

    def close(self) -> None:
        self.closed = True
        self._wake.set()
        self.driver.close()

    # -- per-tick work -------------------------------------------------------

    def snapshot_frame(self) -> Frame:
        return frame_from_state(self.world.snapshot(), self.level.time_limit,
                                self.cfg.physics.dt)

    def tick_once(self) -> Frame:
        external = apply_human_input(self.held, self.roles)
        snap = snapshot_from_world(self.world.snapshot(), self.level, self.cfg)
        res = self.driver.tick(snap, external=external)
        self.world.step(res.circle_action, res.rect_action)
        if self.world.all_collected or self.world.tick >= self.max_ticks:
            self.done = True
        return self.snapshot_frame()

    def accept_input(self, role: Role, inp: Input) -> str:
        if role not in self.human_roles:
            raise ProtocolError("role %s takes no live input" % role.value)
        if inp.action not in _LEGAL[role]:
            raise ProtocolError("action %s is not legal for the %s"
                                % (inp.action.name, role.value))
        verdict = vet_input(inp.tick, self.world.tick)
        if verdict == "ok":
            self.held[role] = inp.action
        elif verdict == "stale":
            self.stale_dropped += 1
        return verdict

    # -- replay playback -----------------------------------------------------

    def start_replay(self, path: str) -> None:
        try:
            replay = load_replay(path)
        except (OSError, ReplayError) as exc:
            raise ReplayError(str(exc)) from exc
        lines, end = replay_frames(replay)
        self._replay_lines = lines
        self._replay_end = end

    # -- fan-out -------------------------------------------------------------

    def register(self, client) -> asyncio.Queue:
        q: asyncio.Queue = asyncio.Queue(maxsize=QUEUE_FRAMES)
        self.clients[client] = q
        return q

    def unregister(self, client) -> None:
        self.clients.pop(client, None)
        for role, holder in list(self.players.items()):
            if holder is client:
                del self.players[role]
                self.held[role] = None   # leaving releases the held force

    def claim(self, role: Role, client) -> bool:
        if role in self.players:
            return False
        self.players[role] = client
        return True

    def broadcast(self, line: str) -> None:
        for q in self.clients.values():
            self._offer(q, line)

    def _offer(self, q: asyncio.Queue, line: str) -> None:
        while True:
            try:
                q.put_nowait(line)
                return
            except asyncio.QueueFull:
                try:
                    q.get_nowait()   # drop the oldest frame, never block
                    self.dropped_frames += 1
                except asyncio.QueueEmpty:
                    pass

    # -- the loop ------------------------------------------------------------

    async def run(self) -> None:
        loop = asyncio.get_running_loop()
        deadline = loop.time()
        while not self.closed:
            if self._replay_lines is not None:
                if self._replay_lines:
                    self.broadcast(self._replay_lines.pop(0))
                else:
                    self.broadcast(self._replay_end)
                    self._replay_lines = None
                    self._replay_end = None
            elif not self.paused and not self.done:
                frame = self.tick_once()
                self.broadcast(encode_frame(frame))
                if self.done:
                    self.broadcast(encode_control("end"))
            else:
                await asyncio.sleep(0.02)
                deadline = loop.time()
                continue
            deadline += self.cfg.physics.dt / self.speed
            delay = deadline - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                deadline = loop.time()   # too slow; do not bank the debt


def replay_frames(replay: Replay) -> tuple[list[str], str]:
    """Re-simulate a replay into frame lines plus its terminal line.

    The terminal line is a control "end" when the final state hash matches
    the recorded one, otherwise an error frame that ends the stream.
    """
    aw = ArrayWorld(replay.level, replay.cfg, replay.seed)
    dt = replay.cfg.physics.dt
    tl = replay.level.time_limit
    lines = []
    for rec in replay.ticks:
        aw.step(Action(rec.circle_action), Action(rec.rect_action))
        lines.append(encode_frame(frame_from_state(aw.snapshot(), tl, dt)))
    ok = replay.result is not None and aw.hash() == replay.result.final_hash
    end = encode_control("end") if ok else encode_error(
        "VerificationFailed", "final state hash does not match the recording")
    return lines, end


# -- socket plumbing ---------------------------------------------------------


def _resolve_level(value: object) -> LevelSpec:
    if not isinstance(value, str) or not value:
        raise ServiceError("loadLevel wants a level path or pack/name")
    if os.path.exists(value):
        return load_level(value)
    pack_name, _, lvl = value.partition("/")
    if lvl:
        pack = load_bundled_pack(pack_name)
        for level in pack.levels:
            if level.name == lvl:
                return level
    raise ServiceError("no level at %r" % value)


async def _sender(ws, q: asyncio.Queue) -> None:
    while True:
        line = await q.get()
        await ws.send_text(line)


def build_app(session: Session):
    from starlette.applications import Starlette
    from starlette.routing import WebSocketRoute
    from starlette.websockets import WebSocketDisconnect

    async def endpoint(ws):
        await ws.accept()
        client = object()
        sender = None
        try:
            try:
                cmd = decode_client(await ws.receive_text())
                if not isinstance(cmd, Hello):
                    raise ProtocolError("first message must be a hello")
                role = None
                if cmd.role in ("circle", "rectangle"):
                    role = Role(cmd.role)
                    if role not in session.human_roles:
                        raise ProtocolError("the %s is not playable here" % cmd.role)
                    if not session.claim(role, client):
                        await ws.send_text(encode_error(
                            "RoleTaken", "someone already plays the %s" % cmd.role))
                        await ws.close()
                        return
            except ProtocolError as exc:
                await ws.send_text(encode_error("ProtocolError", str(exc)))
                await ws.close()
                return

            q = session.register(client)
            sender = asyncio.create_task(_sender(ws, q))
            # late joiners get the static geometry and the current state first
            session._offer(q, encode_control("level", serialize_level(session.level)))
            session._offer(q, encode_frame(session.snapshot_frame()))

            while True:
                line = await ws.receive_text()
                try:
                    msg = decode_client(line)
                    if isinstance(msg, Input):
                        if role is None:
                            raise ProtocolError("spectators send no input")
                        verdict = session.accept_input(role, msg)
                        if verdict != "ok":
                            session._offer(q, encode_error(
                                "StaleInput" if verdict == "stale" else "FutureInput",
                                "input tick %d at world tick %d"
                                % (msg.tick, session.world.tick)))
                    elif isinstance(msg, Control):
                        await _handle_control(session, q, msg)
                    else:
                        raise ProtocolError("already said hello")
                except ProtocolError as exc:
                    await ws.send_text(encode_error("ProtocolError", str(exc)))
                    await ws.close()
                    return
        except WebSocketDisconnect:
            pass
        finally:
            if sender is not None:
                sender.cancel()
                with contextlib.suppress(asyncio.CancelledError):
                    await sender
            session.unregister(client)

    async def _handle_control(session: Session, q: asyncio.Queue, msg: Control) -> None:
        if msg.command == "start":
            session.paused = False
        elif msg.command == "pause":
            session.paused = True
        elif msg.command == "setSpeed":
            v = msg.value
            if isinstance(v, bool) or not isinstance(v, (int, float)) \
                    or not (SPEED_MIN <= float(v) <= SPEED_MAX):
                raise ProtocolError("speed must be a number in [%g, %g]"
                                    % (SPEED_MIN, SPEED_MAX))
            session.speed = float(v)
        elif msg.command == "loadLevel":
            try:
                session.load_level(_resolve_level(msg.value))
            except (ServiceError, OSError) as exc:
                session._offer(q, encode_error("LoadFailed", str(exc)))
        elif msg.command == "loadReplay":
            if not isinstance(msg.value, str):
                session._offer(q, encode_error("LoadFailed", "loadReplay wants a path"))
                return
            try:
                session.start_replay(msg.value)
            except (ReplayError, OSError) as exc:
                session._offer(q, encode_error("CorruptReplay", str(exc)))

    @contextlib.asynccontextmanager
    async def lifespan(app):
        task = asyncio.create_task(session.run())
        try:
            yield
        finally:
            session.close()
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    return Starlette(routes=[WebSocketRoute("/ws", endpoint)], lifespan=lifespan)


def serve(host: str, port: int, cfg: Config, level_path: str,
          circle: str | None, rect: str | None, speed: float = 1.0) -> None:
    import uvicorn

    if not (SPEED_MIN <= speed <= SPEED_MAX):
        raise ServiceError("speed must be in [%g, %g]" % (SPEED_MIN, SPEED_MAX))
    level = load_level(level_path)
    session = Session(level, cfg, circle=circle, rect=rect, speed=speed)
    app = build_app(session)
    uvicorn.run(app, host=host, port=port, log_level="warning")
