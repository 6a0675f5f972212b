from .engine import (
    ArrayWorld,
    apply_circle_action,
    apply_rectangle_action,
    collect_diamonds,
    make_world,
    pack_config,
    pack_platforms,
    pack_script,
    resolve_collisions,
    rollout,
    step,
    world_hash,
)
from .kernel import NUMBA_ENABLED
from .types import (
    Action,
    CIRCLE_ACTIONS,
    CircleState,
    DiamondState,
    IllegalAction,
    InconsistentWorld,
    RECTANGLE_ACTIONS,
    RectangleState,
    WorldState,
)

__all__ = [
    "Action", "ArrayWorld", "CIRCLE_ACTIONS", "CircleState", "DiamondState",
    "IllegalAction", "InconsistentWorld", "NUMBA_ENABLED", "RECTANGLE_ACTIONS",
    "RectangleState", "WorldState", "apply_circle_action", "apply_rectangle_action",
    "collect_diamonds", "make_world", "pack_config", "pack_platforms", "pack_script",
    "resolve_collisions", "rollout", "step", "world_hash",
]
