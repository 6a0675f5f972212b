"""Forward-model throughput, compiled backend against the pure fallback.

Measures a scripted rollout on a two-character, ten-platform arena and
prints ticks per second for both stepping paths, plus the final state
hash of each so a speed difference can never hide a behavior difference.

    python3 benchmarks/throughput.py            # compare both backends
    python3 benchmarks/throughput.py --ticks N  # adjust the compiled leg
"""

import argparse
import os
import random
import subprocess
import sys
import time

LEVEL = """\
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

REALTIME = 60.0   # simulation ticks per wall second at speed 1


def _script(n):
    from gfsim.world import Action
    r = random.Random(3)
    cpool = [Action.NoAction, Action.Jump, Action.RollLeft, Action.RollRight]
    rpool = [Action.NoAction, Action.SlideLeft, Action.SlideRight,
             Action.MorphUp, Action.MorphDown]
    return [(r.choice(cpool), r.choice(rpool)) for _ in range(n)]


HASH_TICKS = 24_000   # fixed-length leg so both backends hash the same run


def measure(nticks):
    from gfsim.config import default_config
    from gfsim.levels import parse_level
    from gfsim.world import ArrayWorld, pack_script
    from gfsim.world.kernel import NUMBA_ENABLED

    cfg = default_config()
    level = parse_level(LEVEL, name="throughput-arena")
    script = pack_script(_script(max(nticks, HASH_TICKS)), max(nticks, HASH_TICKS))

    warm = ArrayWorld(level, cfg, seed=1)
    warm.rollout(script[:60], 60)

    aw = ArrayWorld(level, cfg, seed=1)
    t0 = time.perf_counter()
    aw.rollout(script[:nticks], nticks)
    dt = time.perf_counter() - t0

    check = ArrayWorld(level, cfg, seed=1)
    check.rollout(script[:HASH_TICKS], HASH_TICKS)
    return {
        "backend": "numba" if NUMBA_ENABLED else "python",
        "ticks": nticks,
        "rate": nticks / dt,
        "hash": check.hash(),
    }


def _measure_subprocess(nticks, pure):
    env = dict(os.environ)
    if pure:
        env["GF_PURE_PYTHON"] = "1"
    else:
        env.pop("GF_PURE_PYTHON", None)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--inner", str(nticks)],
        env=env, capture_output=True, text=True, check=True)
    out = {}
    for part in proc.stdout.split():
        key, _, val = part.partition("=")
        out[key] = val
    out["rate"] = float(out["rate"])
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ticks", type=int, default=240_000,
                    help="rollout length for the compiled leg")
    ap.add_argument("--pure-ticks", type=int, default=24_000,
                    help="rollout length for the pure-python leg")
    ap.add_argument("--inner", type=int, metavar="N",
                    help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.inner is not None:
        m = measure(args.inner)
        print("backend=%s rate=%.1f hash=%s" % (m["backend"], m["rate"], m["hash"]))
        return 0

    fast = _measure_subprocess(args.ticks, pure=False)
    slow = _measure_subprocess(args.pure_ticks, pure=True)
    if fast["backend"] == slow["backend"]:
        print("note: numba unavailable, both legs ran the pure path")

    print("%-8s %12s %14s" % ("backend", "ticks/s", "vs real time"))
    for m in (fast, slow):
        print("%-8s %12.0f %13.0fx" % (m["backend"], m["rate"],
                                       m["rate"] / REALTIME))
    print("speedup %.1fx" % (fast["rate"] / slow["rate"]))

    # the fallback exists for checking, so hold it to the same trajectory
    same = fast["hash"] == slow["hash"]
    print("state hashes %s" % ("match" if same else "DIFFER"))
    floor = 6000.0
    ok = fast["rate"] >= floor
    print("floor %.0f ticks/s: %s" % (floor, "met" if ok else "MISSED"))
    return 0 if (same and ok) else 1


if __name__ == "__main__":
    raise SystemExit(main())
