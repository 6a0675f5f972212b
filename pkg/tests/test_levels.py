import pytest

from gfsim.config import default_config
from gfsim.levels import (
    Color,
    LevelFormatError,
    LevelSpec,
    Track,
    level_hash,
    parse_level,
    serialize_level,
    validate_level,
)

MIXED = """\
gf-level v1
# a cooperative level with one filtered platform per character
area 1280 800
time 100
circle 700 760
rectangle 210 510
platform 0 560 420 40 yellow
platform 860 660 420 140 black
diamond 520 420
diamond 105 500
diamond 1070 580
"""


def test_parse_mixed():
    lvl = parse_level(MIXED, name="mixed")
    assert lvl.width == 1280 and lvl.height == 800
    assert lvl.time_limit == 100
    assert lvl.circle_spawn == (700, 760)
    assert lvl.rectangle_spawn == (210, 510)
    colors = [p.color for p in lvl.platforms]
    assert colors.count(Color.Yellow) == 1
    assert colors.count(Color.Black) == 1
    assert len(lvl.diamonds) == 3
    assert lvl.tracks == frozenset({Track.Cooperative})


def test_tracks_follow_spawns():
    solo_c = parse_level("gf-level v1\narea 800 600\ntime 50\ncircle 400 560\ndiamond 100 100\n")
    solo_r = parse_level("gf-level v1\narea 800 600\ntime 50\nrectangle 400 550\ndiamond 100 100\n")
    assert solo_c.tracks == frozenset({Track.Circle})
    assert solo_r.tracks == frozenset({Track.Rectangle})


def test_round_trip_exact():
    lvl = parse_level(MIXED, name="mixed")
    text = serialize_level(lvl)
    again = parse_level(text, name="other-name")
    assert again == lvl  # name is presentation only
    assert level_hash(again) == level_hash(lvl)


def test_hash_ignores_name_but_not_geometry():
    a = parse_level(MIXED, name="a")
    b = parse_level(MIXED, name="b")
    assert level_hash(a) == level_hash(b)
    moved = parse_level(MIXED.replace("diamond 520 420", "diamond 520 421"))
    assert level_hash(moved) != level_hash(a)


def test_platform_color_default_black():
    lvl = parse_level("gf-level v1\narea 800 600\ntime 50\ncircle 400 560\n"
                      "platform 0 100 50 20\ndiamond 100 100\n")
    assert lvl.platforms[0].color is Color.Black


@pytest.mark.parametrize("bad,fragment", [
    ("area 800 600\ntime 50\ncircle 1 1\ndiamond 1 1\n", "first directive"),
    ("gf-level v1\ntime 50\ncircle 1 1\ndiamond 1 1\n", "missing area"),
    ("gf-level v1\narea 800 600\ncircle 1 1\ndiamond 1 1\n", "missing time"),
    ("gf-level v1\narea 800 600\ntime 50\ncircle 1 1\ncircle 2 2\ndiamond 1 1\n", "duplicate circle"),
    ("gf-level v1\narea 800 600\ntime 50\nwall 0 0 10 10\n", "unknown directive"),
    ("gf-level v1\narea 800 600\ntime 50\nplatform 0 0 10 10 mauve\n", "unknown color"),
    ("gf-level v1\narea 800 x\ntime 50\n", "bad number"),
    ("gf-level v1\narea 800\ntime 50\n", "expected 2 numbers"),
])
def test_parse_errors(bad, fragment):
    with pytest.raises(LevelFormatError) as exc:
        parse_level(bad)
    assert fragment in str(exc.value)


def test_validate_accepts_good_level():
    rep = validate_level(parse_level(MIXED), default_config())
    assert rep.ok, rep.errors


def test_validate_catches_problems():
    cfg = default_config()

    no_diamond = LevelSpec(width=800, height=600, time_limit=50,
                           circle_spawn=(400, 560), rectangle_spawn=None,
                           platforms=(), diamonds=())
    assert not validate_level(no_diamond, cfg).ok

    no_spawn = parse_level("gf-level v1\narea 800 600\ntime 50\ndiamond 1 1\n")
    assert not validate_level(no_spawn, cfg).ok

    wall_spawn = parse_level("gf-level v1\narea 800 600\ntime 50\ncircle 10 560\ndiamond 100 100\n")
    assert any("clearance" in e for e in validate_level(wall_spawn, cfg).errors)

    neg_time = parse_level("gf-level v1\narea 800 600\ntime -5\ncircle 400 560\ndiamond 100 100\n")
    assert not validate_level(neg_time, cfg).ok

    outside = parse_level("gf-level v1\narea 800 600\ntime 50\ncircle 400 560\n"
                          "platform 700 0 200 20 black\ndiamond 100 100\n")
    assert any("sticks out" in e for e in validate_level(outside, cfg).errors)

    buried = parse_level("gf-level v1\narea 800 600\ntime 50\ncircle 400 560\n"
                         "platform 0 100 200 100 black\ndiamond 100 150\n")
    assert any("buried" in e for e in validate_level(buried, cfg).errors)
