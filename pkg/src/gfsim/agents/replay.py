"""Replay files: a run reduced to its action and message timeline.

A replay is self-contained: the level and config are embedded base64 next
to their hashes, so verification needs nothing but the file.  Verification
re-runs the physics from the recorded actions and accepts only a bit-exact
final state hash; messages are carried for tooling but cannot influence
physics, which is the point.
"""

from __future__ import annotations

import base64
from dataclasses import dataclass, field

import numpy as np

from ..config import Config, config_hash, parse_config, serialize_config
from ..levels.model import LevelSpec
from ..levels.textio import level_hash, parse_level, serialize_level
from ..numfmt import format9, quantize9
from ..world.engine import ArrayWorld
from ..world.types import Action
from .contract import Message, Role

FORMAT_HEADER = "gf-replay v1"


class ReplayError(ValueError):
    pass


@dataclass(frozen=True)
class TickRecord:
    tick: int
    circle_action: int
    rect_action: int
    messages: tuple[tuple[Role, bytes], ...] = ()


@dataclass(frozen=True)
class ReplayResult:
    completed: bool
    t: float
    collected: int
    final_hash: str


@dataclass
class Replay:
    level: LevelSpec
    cfg: Config
    seed: int
    ticks: list[TickRecord] = field(default_factory=list)
    result: ReplayResult | None = None


class ReplayRecorder:
    def __init__(self, level: LevelSpec, cfg: Config, seed: int):
        self.replay = Replay(level=level, cfg=cfg, seed=seed)

    def record(self, tick: int, circle_action: Action | None, rect_action: Action | None,
               messages: list[Message] | None = None) -> None:
        msgs = tuple((m.sender, m.payload) for m in messages) if messages else ()
        ca = int(circle_action) if circle_action is not None else 0
        ra = int(rect_action) if rect_action is not None else 0
        self.replay.ticks.append(TickRecord(tick, ca, ra, msgs))

    def finalize(self, completed: bool, t: float, collected: int, final_hash: str) -> Replay:
        self.replay.result = ReplayResult(completed=completed, t=quantize9(t),
                                          collected=collected, final_hash=final_hash)
        return self.replay


def serialize_replay(replay: Replay) -> str:
    if replay.result is None:
        raise ReplayError("cannot serialize an unfinished replay")
    level_text = serialize_level(replay.level)
    cfg_text = serialize_config(replay.cfg)
    lines = [
        FORMAT_HEADER,
        "level-hash %s" % level_hash(replay.level),
        "config-hash %s" % config_hash(replay.cfg),
        "seed %d" % replay.seed,
        "level %s" % base64.b64encode(level_text.encode("ascii")).decode("ascii"),
        "config %s" % base64.b64encode(cfg_text.encode("ascii")).decode("ascii"),
        "ticks %d" % len(replay.ticks),
    ]
    for rec in replay.ticks:
        parts = ["t", str(rec.tick), str(rec.circle_action), str(rec.rect_action)]
        for sender, payload in rec.messages:
            parts.append("msg:%s:%s" % (sender.value,
                                        base64.b64encode(payload).decode("ascii")))
        lines.append(" ".join(parts))
    r = replay.result
    lines.append("result %d %s %d %s"
                 % (1 if r.completed else 0, format9(r.t), r.collected, r.final_hash))
    return "\n".join(lines) + "\n"


def parse_replay(text: str) -> Replay:
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip()]
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise ReplayError("missing '%s' header" % FORMAT_HEADER)

    header: dict[str, str] = {}
    i = 1
    while i < len(lines) and not lines[i].startswith("t ") and not lines[i].startswith("result "):
        key, _, value = lines[i].partition(" ")
        header[key] = value.strip()
        i += 1
    for need in ("level-hash", "config-hash", "seed", "level", "config", "ticks"):
        if need not in header:
            raise ReplayError("missing %s header line" % need)

    try:
        level = parse_level(base64.b64decode(header["level"]).decode("ascii"), name="replay")
        cfg = parse_config(base64.b64decode(header["config"]).decode("ascii"))
    except Exception as exc:
        raise ReplayError("bad embedded level or config: %s" % exc) from exc
    if level_hash(level) != header["level-hash"]:
        raise ReplayError("embedded level does not match level-hash")
    if config_hash(cfg) != header["config-hash"]:
        raise ReplayError("embedded config does not match config-hash")

    replay = Replay(level=level, cfg=cfg, seed=int(header["seed"]))
    expect = int(header["ticks"])
    for ln in lines[i:]:
        parts = ln.split()
        if parts[0] == "t":
            if len(parts) < 4:
                raise ReplayError("short tick line: %r" % ln)
            msgs = []
            for extra in parts[4:]:
                if not extra.startswith("msg:"):
                    raise ReplayError("unexpected token %r" % extra)
                _, role_word, b64 = extra.split(":", 2)
                msgs.append((Role(role_word), base64.b64decode(b64)))
            replay.ticks.append(TickRecord(int(parts[1]), int(parts[2]), int(parts[3]),
                                           tuple(msgs)))
        elif parts[0] == "result":
            if len(parts) != 5:
                raise ReplayError("bad result line: %r" % ln)
            replay.result = ReplayResult(completed=parts[1] == "1", t=float(parts[2]),
                                         collected=int(parts[3]), final_hash=parts[4])
        else:
            raise ReplayError("unexpected line %r" % ln)
    if len(replay.ticks) != expect:
        raise ReplayError("ticks header says %d, file has %d" % (expect, len(replay.ticks)))
    if replay.result is None:
        raise ReplayError("missing result line")
    for k, rec in enumerate(replay.ticks):
        if rec.tick != k:
            raise ReplayError("tick %d out of order (expected %d)" % (rec.tick, k))
    return replay


@dataclass
class ReplayVerification:
    ok: bool
    reasons: list[str]
    recomputed_hash: str
    recomputed_t: float
    recomputed_collected: int


def verify_replay(replay: Replay) -> ReplayVerification:
    """Re-run the recorded actions and compare against the claimed result."""
    n = len(replay.ticks)
    script = np.zeros((n, 2), dtype=np.int64)
    for k, rec in enumerate(replay.ticks):
        script[k, 0] = rec.circle_action
        script[k, 1] = rec.rect_action
    aw = ArrayWorld(replay.level, replay.cfg, seed=replay.seed)
    done = aw.rollout(script, n)
    final_hash = aw.hash()
    completed = aw.all_collected
    collected = len(replay.level.diamonds) - aw.uncollected
    t = quantize9((done if completed and done >= 0 else n) * replay.cfg.physics.dt)

    r = replay.result
    reasons = []
    if final_hash != r.final_hash:
        reasons.append("final state hash mismatch")
    if completed != r.completed:
        reasons.append("completion flag mismatch")
    if collected != r.collected:
        reasons.append("collected %d, replay claims %d" % (collected, r.collected))
    if format9(t) != format9(r.t):
        reasons.append("t %s, replay claims %s" % (format9(t), format9(r.t)))
    return ReplayVerification(ok=not reasons, reasons=reasons, recomputed_hash=final_hash,
                              recomputed_t=t, recomputed_collected=collected)


def load_replay(path: str) -> Replay:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_replay(fh.read())


def save_replay(replay: Replay, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_replay(replay))
