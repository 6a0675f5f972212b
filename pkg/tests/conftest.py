import random

import pytest

from gfsim.config import default_config
from gfsim.levels import parse_level

FLAT_BOTH = """\
gf-level v1
area 1280 800
time 100
circle 400 760
rectangle 800 750
diamond 1240 60
"""

FLAT_CIRCLE = """\
gf-level v1
area 1280 800
time 100
circle 400 760
diamond 1240 60
"""

FLAT_RECT = """\
gf-level v1
area 1280 800
time 100
rectangle 800 750
diamond 1240 60
"""

# floor, one mid ledge each side, one color-filtered platform each;
# clearances are generous so random action storms cannot wedge anybody
TERRACED = """\
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


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture
def flat_both():
    return parse_level(FLAT_BOTH, name="flat-both")


@pytest.fixture
def flat_circle():
    return parse_level(FLAT_CIRCLE, name="flat-circle")


@pytest.fixture
def flat_rect():
    return parse_level(FLAT_RECT, name="flat-rect")


@pytest.fixture
def terraced():
    return parse_level(TERRACED, name="terraced")


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels(cfg):
    # first kernel call pays the compile cost; keep it out of test timings
    from gfsim.world import ArrayWorld, Action
    lvl = parse_level(TERRACED, name="warmup")
    aw = ArrayWorld(lvl, cfg)
    aw.step(Action.RollRight, Action.SlideLeft)
    import numpy as np
    aw.rollout(np.zeros((2, 2), dtype=np.int64), 2)


def rng_actions(seed, n, circle=True, rect=True):
    """Seeded random action script as (circle, rect) pairs."""
    from gfsim.world import Action
    r = random.Random(seed)
    cpool = [Action.NoAction, Action.Jump, Action.RollLeft, Action.RollRight]
    rpool = [Action.NoAction, Action.SlideLeft, Action.SlideRight,
             Action.MorphUp, Action.MorphDown]
    out = []
    for _ in range(n):
        ca = r.choice(cpool) if circle else None
        ra = r.choice(rpool) if rect else None
        out.append((ca, ra))
    return out
