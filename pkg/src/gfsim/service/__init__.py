from .frames import (
    DebugDrawItem,
    DebugKind,
    Frame,
    PALETTE,
    ProtocolError,
    decode_client,
    decode_frame,
    encode_control,
    encode_error,
    encode_frame,
    frame_from_state,
)
from .server import (
    Session,
    ServiceError,
    STALE_TICKS,
    apply_human_input,
    build_app,
    replay_frames,
    serve,
    vet_input,
)

__all__ = [
    "DebugDrawItem", "DebugKind", "Frame", "PALETTE", "ProtocolError",
    "decode_client", "decode_frame", "encode_control", "encode_error",
    "encode_frame", "frame_from_state",
    "Session", "ServiceError", "STALE_TICKS", "apply_human_input",
    "build_app", "replay_frames", "serve", "vet_input",
]
