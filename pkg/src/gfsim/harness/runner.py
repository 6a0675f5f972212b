"""Headless run and batch execution.

A run owns everything: fresh world, fresh agents, its own driver.  A batch
is 10 runs per level with seeds baseSeed+runIndex, mean score per level,
total = sum of means.  Runs are independent, so the batch may fan out over
threads; results are reduced in pack order and must not depend on
scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from ..agents.contract import Role, SetupInfo, snapshot_from_world
from ..agents.registry import UnknownAgent, create, provides
from ..agents.replay import Replay, ReplayRecorder
from ..agents.runtime import TickDriver
from ..config import Config
from ..levels.model import LevelSpec, Track
from ..levels.packs import Pack
from ..numfmt import quantize9
from ..world.engine import ArrayWorld
from .score import score_run

RUNS_PER_LEVEL = 10


class AgentLoadError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunResult:
    level_name: str
    run_index: int
    seed: int
    n_collect: int
    t: float            # completion time; equals the time limit when incomplete
    completed: bool
    score: float
    timeouts: int
    notes: str = ""


@dataclass(frozen=True)
class BatchReport:
    track: Track
    agent_id: str
    level_names: tuple[str, ...]
    per_level: tuple[tuple[RunResult, ...], ...]
    level_scores: tuple[float, ...]
    total_score: float

    @property
    def runs(self) -> tuple[RunResult, ...]:
        return tuple(r for group in self.per_level for r in group)


def _roles_for(level: LevelSpec) -> list[Role]:
    roles = []
    if level.has_circle:
        roles.append(Role.Circle)
    if level.has_rectangle:
        roles.append(Role.Rectangle)
    return roles


def _make_agents(level: LevelSpec, cfg: Config, seed: int,
                 circle_agent: str | None, rect_agent: str | None):
    names = {Role.Circle: circle_agent, Role.Rectangle: rect_agent}
    out = {}
    for role in _roles_for(level):
        name = names[role]
        if name is None:
            continue        # driven externally or simply absent
        try:
            out[role] = create(name, role, level, cfg, seed)
        except UnknownAgent as exc:
            raise AgentLoadError(str(exc)) from exc
    return out


def run_level(level: LevelSpec, cfg: Config, seed: int,
              circle_agent: str | None = None,
              rect_agent: str | None = None,
              budget_ms: float | None = None,
              pacer=None) -> tuple[RunResult, Replay]:
    """One scored playthrough with fresh agent instances.

    Simulates until every diamond is collected or the time limit lands,
    recording a replay along the way.  Deterministic given (level, cfg,
    seed, agent names).  ``pacer``, when given, is called once per tick
    with the live world; it only slows the loop down (real-time play),
    never changes it.
    """
    agents = _make_agents(level, cfg, seed, circle_agent, rect_agent)
    driver = TickDriver() if budget_ms is None else TickDriver(budget_ms=budget_ms)
    for role, agent in agents.items():
        driver.add_agent(role, agent)
    partner = len(_roles_for(level)) == 2
    driver.setup({role: SetupInfo(role=role, level=level, cfg=cfg, seed=seed,
                                  partner_present=partner)
                  for role in agents})

    aw = ArrayWorld(level, cfg, seed=seed)
    rec = ReplayRecorder(level, cfg, seed)
    dt = cfg.physics.dt
    max_ticks = int(round(level.time_limit / dt))
    completed_tick = None
    try:
        for k in range(max_ticks):
            snap = snapshot_from_world(aw.snapshot(), level, cfg)
            res = driver.tick(snap)
            aw.step(res.circle_action, res.rect_action)
            rec.record(k, res.circle_action, res.rect_action, res.sent)
            if aw.all_collected:
                completed_tick = aw.tick
                break
            if pacer is not None:
                pacer(aw)
        timeouts = sum(driver.timeouts.values())
    finally:
        driver.close()

    completed = completed_tick is not None
    sim_t = quantize9((completed_tick if completed else max_ticks) * dt)
    n_collect = len(level.diamonds) - aw.uncollected
    replay = rec.finalize(completed, sim_t, n_collect, aw.hash())
    t = sim_t if completed else level.time_limit
    result = RunResult(
        level_name=level.name, run_index=0, seed=seed,
        n_collect=n_collect, t=t, completed=completed,
        score=score_run(completed, min(t, level.time_limit), level.time_limit,
                        n_collect, cfg.score),
        timeouts=timeouts,
    )
    return result, replay


def _check_agent(track: Track, agent: str) -> None:
    needed = {
        Track.Circle: [Role.Circle],
        Track.Rectangle: [Role.Rectangle],
        Track.Cooperative: [Role.Circle, Role.Rectangle],
    }[track]
    for role in needed:
        if not provides(agent, role):
            raise AgentLoadError("agent %r cannot play the %s" % (agent, role.value))


def run_batch(pack: Pack, agent: str, cfg: Config, base_seed: int = 0,
              jobs: int = 1, runs_per_level: int = RUNS_PER_LEVEL) -> BatchReport:
    """Competition procedure over one pack: fixed runs per level, fixed seeds."""
    _check_agent(pack.track, agent)
    circle_agent = agent if pack.track in (Track.Circle, Track.Cooperative) else None
    rect_agent = agent if pack.track in (Track.Rectangle, Track.Cooperative) else None

    def one(args: tuple[int, int]) -> tuple[int, int, RunResult]:
        li, ri = args
        level = pack.levels[li]
        seed = base_seed + ri
        try:
            result, _ = run_level(level, cfg, seed, circle_agent, rect_agent)
        except Exception as exc:   # a broken run scores zero, the batch goes on
            result = RunResult(level_name=level.name, run_index=ri, seed=seed,
                               n_collect=0, t=level.time_limit, completed=False,
                               score=0.0, timeouts=0,
                               notes="failed: %s" % exc)
        else:
            result = replace(result, run_index=ri)
        return li, ri, result

    work = [(li, ri) for li in range(len(pack.levels)) for ri in range(runs_per_level)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(one, work))
    else:
        done = [one(w) for w in work]

    by_level: list[list[RunResult | None]] = [[None] * runs_per_level
                                              for _ in pack.levels]
    for li, ri, result in done:
        by_level[li][ri] = result
    per_level = tuple(tuple(group) for group in by_level)
    level_scores = tuple(quantize9(sum(r.score for r in group) / len(group))
                         for group in per_level)
    return BatchReport(
        track=pack.track, agent_id=agent,
        level_names=tuple(lvl.name for lvl in pack.levels),
        per_level=per_level, level_scores=level_scores,
        total_score=quantize9(sum(level_scores)),
    )
