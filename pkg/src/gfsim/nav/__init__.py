"""Navigation: surface maps, verified maneuver graphs, and planners."""

from .coop import (
    MODE_CIRCLE,
    MODE_COOP,
    MODE_EITHER,
    MODE_RECT,
    MODE_UNREACHABLE,
    CoopPlanItem,
    DiamondAssignment,
    classify,
    solo_tasks,
    spawn_node,
)
from .execute import (
    DONE,
    FAILED,
    RUNNING,
    CharView,
    CollectHint,
    CollectRunner,
    EdgeHint,
    EdgeKind,
    EdgeRunner,
    place_character,
    run_collect,
    run_edge,
    takeoff_speed,
    view_from_array,
    view_from_sensors,
)
from .graph import NavEdge, NavGraph, NavNode, build_graph, rect_travel_height
from .rrt import RrtResult, rrt_to_diamond, rrt_to_point
from .search import CollectTask, Tour, TourStep, dijkstra, plan_tour, route
from .surfaces import (
    Surface,
    extract_surfaces,
    min_clearance,
    required_headroom,
    surface_at,
    surface_below,
)

__all__ = [
    "MODE_CIRCLE", "MODE_COOP", "MODE_EITHER", "MODE_RECT", "MODE_UNREACHABLE",
    "CoopPlanItem", "DiamondAssignment", "classify", "solo_tasks", "spawn_node",
    "DONE", "FAILED", "RUNNING", "CharView", "CollectHint", "CollectRunner",
    "EdgeHint", "EdgeKind", "EdgeRunner", "place_character", "run_collect",
    "run_edge", "takeoff_speed", "view_from_array", "view_from_sensors",
    "NavEdge", "NavGraph", "NavNode", "build_graph", "rect_travel_height",
    "RrtResult", "rrt_to_diamond", "rrt_to_point",
    "CollectTask", "Tour", "TourStep", "dijkstra", "plan_tour", "route",
    "Surface", "extract_surfaces", "min_clearance", "required_headroom",
    "surface_at", "surface_below",
]
