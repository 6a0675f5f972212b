"""Route and tour search over a nav graph.

Tours interleave travel edges with diamond pickups.  The tour state is
(node, set of caught diamonds); A* with an admissible bound keeps it exact,
and when the full goal is unreachable the search degrades to the best
reachable subset rather than failing.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .execute import CollectHint
from .graph import NavEdge, NavGraph


@dataclass(frozen=True)
class CollectTask:
    """One diamond this character can pick up, verified beforehand."""

    diamond: int          # index into the level's diamond list
    node: int             # graph node it is collected from
    hint: CollectHint
    cost: float           # measured seconds for the pickup itself


@dataclass(frozen=True)
class TourStep:
    kind: str             # "travel" or "collect"
    edge: NavEdge | None = None
    task: CollectTask | None = None


@dataclass(frozen=True)
class Tour:
    steps: tuple[TourStep, ...]
    cost: float
    caught: frozenset[int]


def dijkstra(graph: NavGraph, start: int) -> tuple[list[float], list[NavEdge | None]]:
    n = len(graph.nodes)
    dist = [math.inf] * n
    hops = [0] * n
    prev: list[NavEdge | None] = [None] * n
    dist[start] = 0.0
    heap: list[tuple[float, int, int]] = [(0.0, 0, start)]
    while heap:
        d, h, u = heapq.heappop(heap)
        if d > dist[u] or (d == dist[u] and h > hops[u]):
            continue
        for e in graph.neighbors(u):
            nd = d + e.cost
            nh = h + 1
            if nd < dist[e.dst] or (nd == dist[e.dst] and nh < hops[e.dst]):
                dist[e.dst] = nd
                hops[e.dst] = nh
                prev[e.dst] = e
                heapq.heappush(heap, (nd, nh, e.dst))
    return dist, prev


def route(graph: NavGraph, start: int, goal: int) -> list[NavEdge] | None:
    dist, prev = dijkstra(graph, start)
    if math.isinf(dist[goal]):
        return None
    path: list[NavEdge] = []
    at = goal
    while at != start:
        e = prev[at]
        path.append(e)
        at = e.src
    path.reverse()
    return path


def _speed_cap(graph: NavGraph) -> float:
    p = graph.phys
    free_fall = math.sqrt(2.0 * p.gravity * p.arena_height)
    return max(p.max_roll_speed, p.max_slide_speed, p.jump_speed, free_fall)


def plan_tour(graph: NavGraph, start: int, tasks: list[CollectTask],
              max_pops: int = 200_000) -> Tour:
    """Cheapest tour from `start` catching as many of `tasks` as possible.

    Full-coverage tours are optimal; when some diamonds are unreachable the
    result covers the largest reachable subset at least cost.
    """
    if not tasks:
        return Tour((), 0.0, frozenset())

    n_tasks = len(tasks)
    all_mask = (1 << n_tasks) - 1
    by_node: dict[int, list[int]] = {}
    for i, t in enumerate(tasks):
        by_node.setdefault(t.node, []).append(i)

    vcap = _speed_cap(graph)
    marks = [(n.surface.mid, n.surface.y) for n in graph.nodes]

    def h(node: int, mask: int) -> float:
        # each missing pickup still costs its own time, and the farthest
        # missing diamond still has to be reached from here
        rest = 0.0
        far = 0.0
        mx, my = marks[node]
        for i in range(n_tasks):
            if mask >> i & 1:
                continue
            rest += tasks[i].cost
            tx, ty = marks[tasks[i].node]
            far = max(far, math.hypot(tx - mx, ty - my) / vcap)
        return rest + far

    start_state = (start, 0)
    g_best: dict[tuple[int, int], float] = {start_state: 0.0}
    came: dict[tuple[int, int], tuple[tuple[int, int], TourStep]] = {}
    counter = 0
    heap = [(h(start, 0), 0.0, counter, start_state)]
    best_partial = (0, 0.0, start_state)   # (bits caught, cost, state)
    pops = 0

    def bits(mask: int) -> int:
        return bin(mask).count("1")

    while heap and pops < max_pops:
        f, g, _, state = heapq.heappop(heap)
        if g > g_best.get(state, math.inf):
            continue
        pops += 1
        node, mask = state
        nb = bits(mask)
        bp = best_partial
        if nb > bp[0] or (nb == bp[0] and g < bp[1]):
            best_partial = (nb, g, state)
        if mask == all_mask:
            best_partial = (nb, g, state)
            break

        for i in by_node.get(node, ()):
            if mask >> i & 1:
                continue
            nstate = (node, mask | 1 << i)
            ng = g + tasks[i].cost
            if ng < g_best.get(nstate, math.inf):
                g_best[nstate] = ng
                came[nstate] = (state, TourStep("collect", task=tasks[i]))
                counter += 1
                heapq.heappush(heap, (ng + h(node, nstate[1]), ng, counter, nstate))

        for e in graph.neighbors(node):
            nstate = (e.dst, mask)
            ng = g + e.cost
            if ng < g_best.get(nstate, math.inf):
                g_best[nstate] = ng
                came[nstate] = (state, TourStep("travel", edge=e))
                counter += 1
                heapq.heappush(heap, (ng + h(e.dst, mask), ng, counter, nstate))

    _, cost, state = best_partial
    steps: list[TourStep] = []
    at = state
    while at != start_state:
        prev_state, step = came[at]
        steps.append(step)
        at = prev_state
    steps.reverse()
    caught = frozenset(tasks[i].diamond for i in range(n_tasks)
                       if state[1] >> i & 1)
    return Tour(tuple(steps), cost, caught)
