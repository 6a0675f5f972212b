"""Standalone driver printing a state hash after a fixed noisy run.

Run as a subprocess by test_backends.py with GF_PURE_PYTHON toggled; both
backends must print identical lines.
"""

import random
import sys

from gfsim.config import default_config, with_physics
from gfsim.levels import parse_level
from gfsim.world import Action, ArrayWorld
from gfsim.world.kernel import NUMBA_ENABLED, _noise_pair

LEVEL = """\
gf-level v1
area 1280 800
time 100
circle 200 760
rectangle 1000 750
platform 0 520 300 40 black
platform 980 560 300 40 black
platform 430 640 160 30 green
platform 700 640 160 30 yellow
diamond 150 460
diamond 1100 500
diamond 640 200
"""


def script(seed, n):
    r = random.Random(seed)
    cpool = [Action.NoAction, Action.Jump, Action.RollLeft, Action.RollRight]
    rpool = [Action.NoAction, Action.SlideLeft, Action.SlideRight,
             Action.MorphUp, Action.MorphDown]
    return [(r.choice(cpool), r.choice(rpool)) for _ in range(n)]


def main():
    lvl = parse_level(LEVEL, name="probe")
    cfg = with_physics(default_config(), noise_std=0.5)
    aw = ArrayWorld(lvl, cfg, seed=42)
    for ca, ra in script(7, 300):
        aw.step(ca, ra)
    print("backend", "numba" if NUMBA_ENABLED else "python")
    print("hash", aw.hash())
    import numpy as np
    samples = []
    for tick in (0, 1, 999):
        z0, z1 = _noise_pair(np.uint64(42), tick, 0)
        samples += [z0, z1]
    print("noise", " ".join("%.17g" % z for z in samples))
    sys.stdout.flush()


if __name__ == "__main__":
    main()
