from .contract import (
    Agent,
    AgentEvent,
    CircleSensors,
    MAX_MESSAGE_BYTES,
    Message,
    RectangleSensors,
    Role,
    SensorSnapshot,
    SetupInfo,
    TickResult,
    snapshot_from_world,
)
from .registry import UnknownAgent, available, create, provides, register
from .replay import (
    Replay,
    ReplayError,
    ReplayRecorder,
    ReplayResult,
    ReplayVerification,
    TickRecord,
    load_replay,
    parse_replay,
    save_replay,
    serialize_replay,
    verify_replay,
)
from .runtime import DEFAULT_BUDGET_MS, TickDriver

__all__ = [
    "Agent", "AgentEvent", "CircleSensors", "DEFAULT_BUDGET_MS", "MAX_MESSAGE_BYTES",
    "Message", "RectangleSensors", "Replay", "ReplayError", "ReplayRecorder",
    "ReplayResult", "ReplayVerification", "Role", "SensorSnapshot", "SetupInfo",
    "TickDriver", "TickRecord", "TickResult", "UnknownAgent", "available", "create",
    "load_replay", "parse_replay", "provides", "register", "save_replay",
    "serialize_replay", "snapshot_from_world", "verify_replay",
]
