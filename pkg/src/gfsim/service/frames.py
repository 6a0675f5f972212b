"""Wire format for live sessions.

Every message is one line of JSON with a ``type`` discriminator:

    frame    server -> client   world state at one tick
    hello    client -> server   {"role": "spectator"|"circle"|"rectangle"}
    input    client -> server   {"action": "RollRight", "tick": 123}
    control  both ways          {"command": ..., "value": ...}
    error    server -> client   {"error": "RoleTaken", "detail": "..."}

Frames carry only what moves. Static geometry travels once, as a control
message with the level text, right after the hello is answered.

A frame mirrors the world snapshot exactly: numbers are emitted with
shortest-roundtrip repr, so decode(encode(f)) == f bit for bit.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

from ..world.types import Action, WorldState

PALETTE = ("black", "gray", "red", "green", "blue", "yellow", "orange", "purple")

_DECODE_ERR = "ProtocolError"


class ProtocolError(Exception):
    """Malformed or out-of-contract message; the connection gets closed."""


class DebugKind(enum.Enum):
    Line = "line"
    Polyline = "polyline"
    CircleShape = "circle"
    Rect = "rect"
    Text = "text"


# geometry arity per kind; polyline is any even count of coordinates >= 4
_ARITY = {
    DebugKind.Line: 4,
    DebugKind.CircleShape: 3,
    DebugKind.Rect: 4,
    DebugKind.Text: 2,
}


@dataclass(frozen=True)
class DebugDrawItem:
    """One overlay primitive an agent (or the server) wants drawn."""

    kind: DebugKind
    geometry: tuple[float, ...]
    color: str = "black"
    label: str | None = None

    def __post_init__(self):
        if self.color not in PALETTE:
            raise ProtocolError("color %r not in palette" % (self.color,))
        if not all(math.isfinite(v) for v in self.geometry):
            raise ProtocolError("debug geometry must be finite")
        n = len(self.geometry)
        want = _ARITY.get(self.kind)
        if want is not None and n != want:
            raise ProtocolError("%s wants %d coordinates, got %d"
                                % (self.kind.value, want, n))
        if self.kind is DebugKind.Polyline and (n < 4 or n % 2):
            raise ProtocolError("polyline wants an even coordinate count >= 4")
        if self.kind is DebugKind.Text and self.label is None:
            raise ProtocolError("text item needs a label")


@dataclass(frozen=True)
class Frame:
    tick: int
    elapsed: float
    circle: tuple[float, float, float, float] | None
    rectangle: tuple[float, float, float, float, float] | None
    diamonds: tuple[tuple[float, float, bool], ...]
    n_collect: int
    time_limit: float
    debug_items: tuple[DebugDrawItem, ...] = field(default=())


def frame_from_state(state: WorldState, time_limit: float, dt: float,
                     debug_items: tuple[DebugDrawItem, ...] = ()) -> Frame:
    c = state.circle
    r = state.rectangle
    return Frame(
        tick=state.tick,
        elapsed=state.tick * dt,
        circle=None if c is None else (c.x, c.y, c.vx, c.vy),
        rectangle=None if r is None else (r.x, r.y, r.vx, r.vy, r.height),
        diamonds=tuple((d.x, d.y, d.collected) for d in state.diamonds),
        n_collect=sum(1 for d in state.diamonds if d.collected),
        time_limit=time_limit,
        debug_items=debug_items,
    )


def _item_obj(it: DebugDrawItem) -> dict:
    obj = {"kind": it.kind.value, "points": list(it.geometry), "color": it.color}
    if it.label is not None:
        obj["label"] = it.label
    return obj


def encode_frame(frame: Frame) -> str:
    obj = {
        "type": "frame",
        "tick": frame.tick,
        "elapsed": frame.elapsed,
        "circle": None if frame.circle is None else list(frame.circle),
        "rectangle": None if frame.rectangle is None else list(frame.rectangle),
        "diamonds": [[d[0], d[1], d[2]] for d in frame.diamonds],
        "nCollect": frame.n_collect,
        "timeLimit": frame.time_limit,
        "debugItems": [_item_obj(it) for it in frame.debug_items],
    }
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def _need(obj: dict, key: str, types) -> object:
    try:
        v = obj[key]
    except KeyError:
        raise ProtocolError("missing field %r" % key) from None
    if not isinstance(v, types):
        raise ProtocolError("field %r has the wrong shape" % key)
    return v


def _floats(v: object, n: int, what: str) -> tuple[float, ...]:
    if not isinstance(v, list) or len(v) != n:
        raise ProtocolError("%s wants %d numbers" % (what, n))
    out = []
    for u in v:
        if isinstance(u, bool) or not isinstance(u, (int, float)):
            raise ProtocolError("%s wants %d numbers" % (what, n))
        out.append(float(u))
    return tuple(out)


def _parse_obj(line: str) -> dict:
    try:
        obj = json.loads(line)
    except ValueError as exc:
        raise ProtocolError("not valid JSON: %s" % exc) from None
    if not isinstance(obj, dict):
        raise ProtocolError("message must be a JSON object")
    return obj


def decode_frame(line: str) -> Frame:
    obj = _parse_obj(line)
    if obj.get("type") != "frame":
        raise ProtocolError("not a frame message")
    tick = _need(obj, "tick", int)
    elapsed = _need(obj, "elapsed", (int, float))
    circle = obj.get("circle")
    rect = obj.get("rectangle")
    diamonds = _need(obj, "diamonds", list)
    dd = []
    for d in diamonds:
        if not isinstance(d, list) or len(d) != 3 or not isinstance(d[2], bool):
            raise ProtocolError("diamond wants [x, y, collected]")
        x, y = _floats(d[:2], 2, "diamond")
        dd.append((x, y, d[2]))
    items = []
    for raw in _need(obj, "debugItems", list):
        if not isinstance(raw, dict):
            raise ProtocolError("debug item must be an object")
        try:
            kind = DebugKind(raw.get("kind"))
        except ValueError:
            raise ProtocolError("unknown debug kind %r" % raw.get("kind")) from None
        pts = raw.get("points")
        if not isinstance(pts, list):
            raise ProtocolError("debug item wants points")
        geom = _floats(pts, len(pts), "debug points")
        items.append(DebugDrawItem(kind, geom, str(raw.get("color", "black")),
                                   raw.get("label")))
    return Frame(
        tick=int(tick),
        elapsed=float(elapsed),
        circle=None if circle is None else _floats(circle, 4, "circle"),
        rectangle=None if rect is None else _floats(rect, 5, "rectangle"),
        diamonds=tuple(dd),
        n_collect=int(_need(obj, "nCollect", int)),
        time_limit=float(_need(obj, "timeLimit", (int, float))),
        debug_items=tuple(items),
    )


# -- client-side commands ----------------------------------------------------

ROLES = ("spectator", "circle", "rectangle")
COMMANDS = ("start", "pause", "setSpeed", "loadLevel", "loadReplay")


@dataclass(frozen=True)
class Hello:
    role: str


@dataclass(frozen=True)
class Input:
    action: Action
    tick: int


@dataclass(frozen=True)
class Control:
    command: str
    value: object = None


def decode_client(line: str) -> Hello | Input | Control:
    obj = _parse_obj(line)
    t = obj.get("type")
    if t == "hello":
        role = _need(obj, "role", str)
        if role not in ROLES:
            raise ProtocolError("unknown role %r" % role)
        return Hello(role)
    if t == "input":
        name = _need(obj, "action", str)
        try:
            action = Action[name]
        except KeyError:
            raise ProtocolError("unknown action %r" % name) from None
        tick = _need(obj, "tick", int)
        return Input(action, int(tick))
    if t == "control":
        cmd = _need(obj, "command", str)
        if cmd not in COMMANDS:
            raise ProtocolError("unknown control %r" % cmd)
        return Control(cmd, obj.get("value"))
    raise ProtocolError("unknown message type %r" % t)


def encode_error(code: str, detail: str = "") -> str:
    return json.dumps({"type": "error", "error": code, "detail": detail},
                      separators=(",", ":"))


def encode_control(command: str, value: object = None) -> str:
    obj = {"type": "control", "command": command}
    if value is not None:
        obj["value"] = value
    return json.dumps(obj, separators=(",", ":"))
