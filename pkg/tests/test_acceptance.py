"""End-to-end acceptance gates, one test per contract point.

Each test checks one promised property at its stated tolerance and time
budget: exact scoring, the 100-run batch procedure, determinism with
verifiable replays, forward-model equivalence and throughput, physics
invariants under random action streams, planner optimality against
exhaustive oracles, and the baseline agents actually solving the bundled
levels.  Every test finishes by printing one summary line, so running
this file with -s reads as a checklist.
"""

import itertools
import math
import random
import time

import numpy as np
import pytest

from gfsim.agents.contract import Role, SetupInfo, snapshot_from_world
from gfsim.agents.registry import create
from gfsim.agents.replay import verify_replay
from gfsim.agents.runtime import TickDriver
from gfsim.cli import main
from gfsim.harness.runner import run_batch, run_level
from gfsim.harness.score import score_run
from gfsim.levels import parse_level
from gfsim.levels.model import Track
from gfsim.levels.packs import Pack, load_bundled_pack
from gfsim.nav.coop import classify
from gfsim.nav.execute import CollectHint, EdgeHint, EdgeKind
from gfsim.nav.graph import NavEdge, NavGraph, NavNode, build_graph
from gfsim.nav.search import CollectTask, dijkstra, plan_tour
from gfsim.nav.surfaces import Surface
from gfsim.numfmt import quantize9
from gfsim.world import (
    NUMBA_ENABLED,
    Action,
    ArrayWorld,
    make_world,
    pack_script,
    rollout,
    world_hash,
)
from conftest import rng_actions


def _done(name, budget, t0, detail):
    elapsed = time.perf_counter() - t0
    assert elapsed < budget, "%s took %.1fs, budget %.0fs" % (name, elapsed, budget)
    print("PASS %s: %s (%.1fs)" % (name, detail, elapsed))


def _all_bundled():
    names = ("circle-public", "circle-private", "rectangle-public",
             "rectangle-private", "coop-public", "coop-private")
    return [lvl for name in names for lvl in load_bundled_pack(name).levels]


def _agents_for(level):
    if level.has_circle and level.has_rectangle:
        return {"circle_agent": "coop", "rect_agent": "coop"}
    if level.has_circle:
        return {"circle_agent": "solo"}
    return {"rect_agent": "solo"}


# --- scoring ----------------------------------------------------------------

def test_scoring_formula_exact(cfg, capsys):
    t0 = time.perf_counter()
    assert main(["score", "--completed", "--t", "40", "--tmax", "100",
                 "--collect", "3"]) == 0
    assert capsys.readouterr().out == "120.000000\n"

    sc = cfg.score
    rng = random.Random(11)
    for _ in range(10_000):
        t_max = rng.uniform(0.5, 500.0)
        t = rng.uniform(0.0, t_max)
        n = rng.randrange(0, 20)
        completed = rng.random() < 0.5
        closed = sc.v_collect * n
        if completed:
            closed += sc.v_completed * (t_max - t) / t_max
        # scores carry nine significant digits; compare at that precision
        assert abs(score_run(completed, t, t_max, n, sc) - quantize9(closed)) <= 1e-9
    _done("scoring-formula", 1.0, t0, "CLI prints 120.000000; 10000 samples within 1e-9")


# --- competition procedure --------------------------------------------------

def test_competition_procedure(cfg):
    t0 = time.perf_counter()
    levels = (load_bundled_pack("circle-public").levels
              + load_bundled_pack("circle-private").levels)
    pack = Pack(name="circle-all", track=Track.Circle, visibility="private",
                levels=levels)
    rep = run_batch(pack, "solo", cfg, jobs=4)
    assert len(rep.runs) == 100
    assert len(rep.per_level) == 10
    for mean, group in zip(rep.level_scores, rep.per_level):
        assert len(group) == 10
        assert mean == quantize9(sum(r.score for r in group) / 10)
    assert rep.total_score == quantize9(sum(rep.level_scores))
    _done("competition-procedure", 120.0, t0,
          "100 runs, 10 level means, total %.3f" % rep.total_score)


# --- determinism and replay -------------------------------------------------

def test_determinism_and_replay(cfg):
    t0 = time.perf_counter()
    pairs = (load_bundled_pack("circle-public").levels
             + load_bundled_pack("circle-private").levels
             + load_bundled_pack("rectangle-public").levels
             + load_bundled_pack("coop-public").levels)
    assert len(pairs) == 20
    for i, level in enumerate(pairs):
        agents = _agents_for(level)
        a, ra = run_level(level, cfg, seed=i, **agents)
        b, _ = run_level(level, cfg, seed=i, **agents)
        assert a == b, level.name
        assert ra.result.final_hash == _.result.final_hash
        v = verify_replay(ra)
        assert v.ok, "%s: %s" % (level.name, v.reasons)
    _done("determinism-replay", 120.0, t0, "20 level-agent pairs repeat and verify")


# --- forward model ----------------------------------------------------------

def test_forward_model_equivalence(cfg):
    t0 = time.perf_counter()
    levels = _all_bundled()
    rng = random.Random(23)
    for k in range(25):
        level = rng.choice(levels)
        script = rng_actions(1000 + k, 1000, circle=level.has_circle,
                             rect=level.has_rectangle)
        live = ArrayWorld(level, cfg)
        for ca, raction in script:
            live.step(ca, raction)
        final, _ = rollout(make_world(level, cfg), script, 1000, level, cfg)
        assert world_hash(final, level, cfg) == live.hash(), level.name
    _done("forward-model-equivalence", 30.0, t0,
          "25 levels x 1000 ticks, rollout == live stepping bit for bit")


INVARIANT_ARENA = """\
gf-level v1
area 1280 800
time 600
circle 200 740
rectangle 1000 730
platform 300 600 200 30 black
platform 600 500 180 30 yellow
platform 850 430 180 30 green
platform 100 300 220 30 black
platform 500 680 120 120 black
diamond 400 560
diamond 690 470
diamond 940 400
diamond 1200 760
"""


def test_physics_invariants(cfg):
    t0 = time.perf_counter()
    p = cfg.physics
    level = parse_level(INVARIANT_ARENA, name="invariant-arena")
    hard_c = [q for q in level.platforms if q.color.tangible_to_circle()]
    hard_r = [q for q in level.platforms if q.color.tangible_to_rectangle()]
    vy_cap = math.sqrt(2.0 * p.gravity * p.arena_height) + p.jump_speed + 1.0

    aw = ArrayWorld(level, cfg, seed=5)
    uncollected = len(level.diamonds)
    for ca, raction in rng_actions(77, 10_000):
        aw.step(ca, raction)
        s = aw.state
        cx, cy, cvx, cvy = s[0], s[1], s[2], s[3]
        rx, ry, rvx, rvy, rh = s[6], s[7], s[8], s[9], s[10]
        rw = p.rect_area / rh

        # containment and morph bounds, one skin of slack
        assert p.circle_radius - 1 <= cx <= level.width - p.circle_radius + 1
        assert p.circle_radius - 1 <= cy <= level.height - p.circle_radius + 1
        assert rw / 2 - 1 <= rx <= level.width - rw / 2 + 1
        assert rh / 2 - 1 <= ry <= level.height - rh / 2 + 1
        assert p.h_min <= rh <= p.h_max

        # area conservation
        assert abs(rh * rw - p.rect_area) / p.rect_area < 1e-6

        # speed caps (reflections may only shrink speed)
        assert abs(cvx) <= p.max_roll_speed + 1.0
        assert abs(rvx) <= p.max_slide_speed + 1.0
        assert abs(cvy) <= vy_cap and abs(rvy) <= vy_cap

        # colored platforms: tangible boxes stay impenetrable past the skin
        for q in hard_c:
            qx = min(max(cx, q.x), q.right)
            qy = min(max(cy, q.y), q.bottom)
            assert math.hypot(cx - qx, cy - qy) > p.circle_radius - 1.5
        for q in hard_r:
            ox = min(rx + rw / 2, q.right) - max(rx - rw / 2, q.x)
            oy = min(ry + rh / 2, q.bottom) - max(ry - rh / 2, q.y)
            assert min(ox, oy) < 1.5

        # collection only ever shrinks the remaining set
        assert aw.uncollected <= uncollected
        uncollected = aw.uncollected

    # an airborne jump must change nothing against doing nothing
    a = ArrayWorld(level, cfg, seed=5)
    b = ArrayWorld(level, cfg, seed=5)
    a.step(Action.Jump, None)
    b.step(Action.Jump, None)
    for _ in range(12):
        a.step(Action.Jump, None)
        b.step(Action.NoAction, None)
        assert np.array_equal(a.state, b.state)

    _done("physics-invariants", 60.0, t0,
          "10000 random ticks hold area, caps, containment, filters")


# --- planner oracles --------------------------------------------------------

def _random_graph(rng, phys, n, p_edge=0.4):
    # identical marks keep the tour heuristic admissible for arbitrary costs
    surf = [Surface(index=i, y=800.0, x_left=600.0, x_right=680.0)
            for i in range(n)]
    nodes = [NavNode(i, surf[i]) for i in range(n)]
    hint = EdgeHint(EdgeKind.Roll, 1, 640.0, 0.0, 640.0)
    edges = [NavEdge(a, b, EdgeKind.Roll, hint, round(rng.uniform(0.1, 4.0), 3))
             for a in range(n) for b in range(n)
             if a != b and rng.random() < p_edge]
    return NavGraph(Role.Circle, phys, nodes, edges)


def _best_simple_paths(graph, start):
    """Cheapest simple path to every node, by full enumeration."""
    n = len(graph.nodes)
    best = [math.inf] * n
    best[start] = 0.0
    seen = [False] * n
    seen[start] = True

    def walk(u, cost):
        for e in graph.neighbors(u):
            if seen[e.dst]:
                continue
            c = cost + e.cost
            if c < best[e.dst]:
                best[e.dst] = c
            seen[e.dst] = True
            walk(e.dst, c)
            seen[e.dst] = False

    walk(start, 0.0)
    return best


def _best_tour(graph, start, tasks):
    dist = {}

    def d(a, b):
        if a not in dist:
            dist[a] = dijkstra(graph, a)[0]
        return dist[a][b]

    for k in range(len(tasks), -1, -1):
        found = None
        for subset in itertools.combinations(range(len(tasks)), k):
            for order in itertools.permutations(subset):
                at, cost = start, 0.0
                for i in order:
                    leg = d(at, tasks[i].node)
                    if math.isinf(leg):
                        cost = math.inf
                        break
                    cost += leg + tasks[i].cost
                    at = tasks[i].node
                if math.isfinite(cost) and (found is None or cost < found):
                    found = cost
        if found is not None:
            return k, found
    return 0, 0.0


def test_planner_oracle_equivalence(cfg):
    t0 = time.perf_counter()
    rng = random.Random(31)
    for _ in range(200):
        g = _random_graph(rng, cfg.physics, rng.randint(2, 8))
        start = rng.randrange(len(g.nodes))
        dist, _ = dijkstra(g, start)
        ref = _best_simple_paths(g, start)
        assert all(a == b or abs(a - b) < 1e-9 for a, b in zip(dist, ref))

    hint = CollectHint((640.0, 760.0), 640.0)
    for _ in range(200):
        g = _random_graph(rng, cfg.physics, rng.randint(2, 8))
        start = rng.randrange(len(g.nodes))
        tasks = [CollectTask(i, rng.randrange(len(g.nodes)), hint,
                             round(rng.uniform(0.2, 2.0), 3))
                 for i in range(rng.randint(1, 5))]
        tour = plan_tour(g, start, tasks)
        n_ref, cost_ref = _best_tour(g, start, tasks)
        assert len(tour.caught) == n_ref
        assert abs(tour.cost - cost_ref) < 1e-9
    _done("planner-oracles", 60.0, t0,
          "dijkstra == path enumeration, tours == exhaustive, 200+200 graphs")


# --- baseline competence ----------------------------------------------------

def _watched_run(level, cfg, seed, circle_agent=None, rect_agent=None):
    """One run that also attributes each pickup to a character."""
    names = {Role.Circle: circle_agent, Role.Rectangle: rect_agent}
    roles = [r for r, n in names.items() if n is not None]
    partner = level.has_circle and level.has_rectangle
    driver = TickDriver()
    for role in roles:
        driver.add_agent(role, create(names[role], role, level, cfg, seed))
    driver.setup({r: SetupInfo(role=r, level=level, cfg=cfg, seed=seed,
                               partner_present=partner) for r in roles})
    aw = ArrayWorld(level, cfg, seed=seed)
    p = cfg.physics
    events = []
    try:
        for _ in range(int(round(level.time_limit / p.dt))):
            snap = snapshot_from_world(aw.snapshot(), level, cfg)
            res = driver.tick(snap)
            before = aw.diamonds[:, 2].copy()
            aw.step(res.circle_action, res.rect_action)
            for i in np.flatnonzero((before == 0.0) & (aw.diamonds[:, 2] != 0.0)):
                dx, dy = level.diamonds[i].x, level.diamonds[i].y
                s = aw.state
                # same predicate and priority as the pickup rule
                if (level.has_circle
                        and math.hypot(dx - s[0], dy - s[1])
                        <= p.circle_radius + p.pickup_slop):
                    who = "circle"
                else:
                    who = "rectangle"
                events.append((int(i), who, aw.tick))
            if aw.all_collected:
                break
    finally:
        driver.close()
    return aw.all_collected, events


def _solved_levels(pack_name, cfg, agents, need=8):
    solved = []
    for level in load_bundled_pack(pack_name).levels:
        wins = sum(run_level(level, cfg, seed, **agents)[0].completed
                   for seed in range(10))
        if wins >= need:
            solved.append(level.name)
    return solved


def test_baseline_competence(cfg):
    t0 = time.perf_counter()
    circle_ok = _solved_levels("circle-public", cfg, {"circle_agent": "solo"})
    assert len(circle_ok) >= 4, circle_ok
    rect_ok = _solved_levels("rectangle-public", cfg, {"rect_agent": "solo"})
    assert len(rect_ok) >= 4, rect_ok

    riding = next(l for l in load_bundled_pack("coop-public").levels
                  if l.name == "riding")
    cg = build_graph(riding, cfg, Role.Circle)
    rg = build_graph(riding, cfg, Role.Rectangle)
    modes = {a.diamond: a.mode for a in classify(riding, cfg, cg, rg)}
    assert modes == {0: "coop_height", 1: "rectangle", 2: "circle"}

    good = 0
    for seed in range(10):
        completed, events = _watched_run(riding, cfg, seed,
                                         circle_agent="coop", rect_agent="coop")
        who = {d: w for d, w, _ in events}
        divided = who.get(1) == "rectangle" and who.get(2) == "circle"
        good += completed and divided
    assert good >= 7, good
    _done("baseline-competence", 600.0, t0,
          "circle %d/5, rectangle %d/5, riding %d/10 with correct division"
          % (len(circle_ok), len(rect_ok), good))


def test_order_dependent_solvability(cfg):
    t0 = time.perf_counter()
    gate = next(l for l in load_bundled_pack("circle-public").levels
                if l.name == "order-gate")
    for seed in range(10):
        completed, events = _watched_run(gate, cfg, seed, circle_agent="solo")
        assert completed, seed
        # the ledge diamond must come first: dropping for the far one
        # strands the circle below the ledge
        assert events[0][0] == 0, (seed, events)
    _done("order-dependence", 120.0, t0, "ledge diamond first in 10/10 runs")


# --- throughput -------------------------------------------------------------

THROUGHPUT_ARENA = """\
gf-level v1
area 1280 800
time 600
circle 200 740
rectangle 1000 730
platform 100 650 160 30 black
platform 320 560 160 30 black
platform 540 470 160 30 yellow
platform 760 560 160 30 green
platform 980 650 160 30 black
platform 200 300 160 30 black
platform 500 220 160 30 yellow
platform 800 300 160 30 green
platform 420 700 100 100 black
platform 40 140 120 30 black
diamond 640 100
diamond 100 100
diamond 1200 100
"""


def test_forward_model_throughput(cfg):
    if not NUMBA_ENABLED:
        pytest.skip("pure-python fallback is for checking, not speed")
    t0 = time.perf_counter()
    level = parse_level(THROUGHPUT_ARENA, name="throughput-arena")
    assert len(level.platforms) == 10
    nticks = 60_000
    script = pack_script(rng_actions(3, nticks), nticks)
    aw = ArrayWorld(level, cfg, seed=1)
    aw.rollout(script[:60], 60)          # touch the kernel before timing
    aw = ArrayWorld(level, cfg, seed=1)
    start = time.perf_counter()
    aw.rollout(script, nticks)
    rate = nticks / (time.perf_counter() - start)
    assert rate >= 6000.0, "%.0f ticks/s" % rate
    _done("forward-model-throughput", 30.0, t0, "%.0f ticks/s" % rate)
