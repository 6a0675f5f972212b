"""Motion control and the built-in agents."""

from .motion import (
    PidGains,
    VelocityController,
    braking_speed,
    circle_drive,
    morph_toward,
    rect_drive,
    stopping_distance,
)

__all__ = [
    "PidGains", "VelocityController", "braking_speed", "circle_drive",
    "morph_toward", "rect_drive", "stopping_distance",
]
