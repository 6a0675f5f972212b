"""The ``gf`` command.

Exit codes: 0 success, 1 usage, 2 validation or verification failure,
3 agent failure.  Config comes from ``--config``, the ``GF_CONFIG``
environment variable, or built-in defaults, in that order.
"""

from __future__ import annotations

import argparse
import sys
import time

from .config import ConfigError, load_config
from .harness import AgentLoadError, run_batch, run_level, score_run, write_report
from .harness.score import InvalidTime
from .levels import (
    LevelFormatError,
    PackError,
    Track,
    load_level,
    resolve_pack,
    validate_level,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_AGENT = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract wants 1
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    p = _Parser(prog="gf", description="Headless cooperative platformer toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_config(sp):
        sp.add_argument("--config", metavar="FILE",
                        help="config file (default: $GF_CONFIG or built-ins)")

    sp = sub.add_parser("run", help="play one level and print the run result")
    sp.add_argument("--level", required=True, metavar="FILE")
    sp.add_argument("--circle-agent", metavar="NAME")
    sp.add_argument("--rect-agent", metavar="NAME")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--speed", type=float, default=1.0,
                    help="real-time pacing multiplier (ignored with --headless)")
    sp.add_argument("--headless", action="store_true",
                    help="run as fast as possible")
    sp.add_argument("--replay-out", metavar="FILE")
    add_config(sp)

    sp = sub.add_parser("batch", help="competition procedure over a level pack")
    sp.add_argument("--pack", required=True,
                    help="pack directory or bundled pack name")
    sp.add_argument("--track", required=True,
                    choices=[t.value for t in Track])
    sp.add_argument("--agent", required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--runs", type=int, default=10, help="runs per level")
    sp.add_argument("--seed", type=int, default=0, help="base seed")
    sp.add_argument("--out", metavar="FILE",
                    help="report path (.csv or .jsonl)")
    add_config(sp)

    sp = sub.add_parser("score", help="evaluate the scoring formula")
    sp.add_argument("--completed", action="store_true")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--tmax", type=float, default=None)
    sp.add_argument("--collect", type=int, required=True)
    add_config(sp)

    sp = sub.add_parser("verify-replay", help="re-simulate a replay and check it")
    sp.add_argument("file")

    sp = sub.add_parser("validate", help="check a level file")
    sp.add_argument("level")
    add_config(sp)

    sp = sub.add_parser("serve", help="live session server")
    sp.add_argument("--port", type=int, default=8732)
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--level", metavar="FILE")
    sp.add_argument("--circle", default="human",
                    help="'human' or 'agent:NAME'")
    sp.add_argument("--rect", default=None,
                    help="'human' or 'agent:NAME'")
    sp.add_argument("--speed", type=float, default=1.0)
    add_config(sp)

    return p


def _load_cfg(args):
    return load_config(getattr(args, "config", None))


def _cmd_run(args) -> int:
    cfg = _load_cfg(args)
    level = load_level(args.level)
    rep = validate_level(level, cfg)
    if not rep.ok:
        for line in rep.lines():
            print(line, file=sys.stderr)
        return EXIT_VALIDATION

    pacer = None if args.headless else _make_pacer(level, cfg, args.speed)
    result, replay = run_level(level, cfg, args.seed,
                               circle_agent=args.circle_agent,
                               rect_agent=args.rect_agent, pacer=pacer)
    if not args.headless:
        print(file=sys.stderr)
    if args.replay_out:
        from .agents.replay import save_replay
        save_replay(replay, args.replay_out)
    print("level=%s seed=%d completed=%s t=%.3f collected=%d score=%.6f timeouts=%d"
          % (result.level_name, result.seed, str(result.completed).lower(),
             result.t, result.n_collect, result.score, result.timeouts))
    return EXIT_OK


def _make_pacer(level, cfg, speed: float):
    """Sleep the loop to real-time pace and narrate progress on stderr."""
    period = cfg.physics.dt / max(speed, 1e-6)
    deadline = time.perf_counter()

    def pace(aw):
        nonlocal deadline
        deadline += period
        lag = deadline - time.perf_counter()
        if lag > 0:
            time.sleep(lag)
        if aw.tick % 60 == 0:
            print("\rt=%6.1fs collected=%d/%d" %
                  (aw.elapsed, len(level.diamonds) - aw.uncollected,
                   len(level.diamonds)), end="", file=sys.stderr)

    return pace


def _cmd_batch(args) -> int:
    cfg = _load_cfg(args)
    pack = resolve_pack(args.pack)
    if pack.track.value != args.track:
        print("pack %r is a %s pack, not %s" % (pack.name, pack.track.value, args.track),
              file=sys.stderr)
        return EXIT_VALIDATION
    report = run_batch(pack, args.agent, cfg, base_seed=args.seed,
                       jobs=args.jobs, runs_per_level=args.runs)
    if args.out:
        write_report(report, args.out)
    for name, mean in zip(report.level_names, report.level_scores):
        print("%-24s %10.3f" % (name, mean))
    print("%-24s %10.3f" % ("total", report.total_score))
    return EXIT_OK


def _cmd_score(args) -> int:
    cfg = _load_cfg(args)
    t_max = cfg.score.t_max if args.tmax is None else args.tmax
    value = score_run(args.completed, args.t, t_max, args.collect, cfg.score)
    print("%.6f" % value)
    return EXIT_OK


def _cmd_verify_replay(args) -> int:
    from .agents.replay import ReplayError, load_replay, verify_replay
    try:
        replay = load_replay(args.file)
    except (OSError, ReplayError) as exc:
        print("cannot load replay: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    v = verify_replay(replay)
    if v.ok:
        print("ok: hash=%s t=%.3f collected=%d"
              % (v.recomputed_hash[:16], v.recomputed_t, v.recomputed_collected))
        return EXIT_OK
    for reason in v.reasons:
        print("mismatch: %s" % reason, file=sys.stderr)
    return EXIT_VALIDATION


def _cmd_validate(args) -> int:
    cfg = _load_cfg(args)
    level = load_level(args.level)
    rep = validate_level(level, cfg)
    for line in rep.lines():
        print(line)
    if rep.ok:
        print("ok: %s" % (level.name or args.level))
        return EXIT_OK
    return EXIT_VALIDATION


def _cmd_serve(args) -> int:
    cfg = _load_cfg(args)
    from .service.server import ServiceError, serve
    try:
        serve(host=args.host, port=args.port, cfg=cfg,
              level_path=args.level, circle=args.circle, rect=args.rect,
              speed=args.speed)
    except ServiceError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "batch": _cmd_batch,
        "score": _cmd_score,
        "verify-replay": _cmd_verify_replay,
        "validate": _cmd_validate,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (LevelFormatError, PackError, ConfigError, InvalidTime) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except AgentLoadError as exc:
        print("agent error: %s" % exc, file=sys.stderr)
        return EXIT_AGENT
    except FileNotFoundError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    raise SystemExit(main())
