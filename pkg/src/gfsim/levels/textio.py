"""Reading and writing the level text format.

The format is line-oriented: a header line, then one directive per line.
Full-line ``#`` comments and blank lines are ignored.  Serialization is
canonical (fixed directive order, ``%.17g`` numbers), so hashing the
serialized form gives a stable identity for a level's geometry regardless
of where it was loaded from.  Names never enter the hash.
"""

from __future__ import annotations

import hashlib

from .model import Color, DiamondSpec, LevelSpec, PlatformSpec

FORMAT_HEADER = "gf-level v1"


class LevelFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


def _floats(parts: list[str], n: int, lineno: int) -> list[float]:
    if len(parts) != n:
        raise LevelFormatError("expected %d numbers, got %d" % (n, len(parts)), lineno)
    out = []
    for p in parts:
        try:
            out.append(float(p))
        except ValueError:
            raise LevelFormatError("bad number %r" % p, lineno) from None
    return out


def parse_level(text: str, name: str = "") -> LevelSpec:
    """Parse level text.

    Args:
        text: full file content.
        name: presentation name to attach, usually the file stem.

    Raises:
        LevelFormatError: on any structural problem, with the line number.
    """
    width = height = None
    time_limit = None
    circle = None
    rectangle = None
    platforms: list[PlatformSpec] = []
    diamonds: list[DiamondSpec] = []
    saw_header = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not saw_header:
            if line != FORMAT_HEADER:
                raise LevelFormatError("first directive must be %r" % FORMAT_HEADER, lineno)
            saw_header = True
            continue
        word, *rest = line.split()
        if word == "area":
            if width is not None:
                raise LevelFormatError("duplicate area", lineno)
            width, height = _floats(rest, 2, lineno)
        elif word == "time":
            if time_limit is not None:
                raise LevelFormatError("duplicate time", lineno)
            (time_limit,) = _floats(rest, 1, lineno)
        elif word == "circle":
            if circle is not None:
                raise LevelFormatError("duplicate circle spawn", lineno)
            x, y = _floats(rest, 2, lineno)
            circle = (x, y)
        elif word == "rectangle":
            if rectangle is not None:
                raise LevelFormatError("duplicate rectangle spawn", lineno)
            x, y = _floats(rest, 2, lineno)
            rectangle = (x, y)
        elif word == "platform":
            if len(rest) == 5:
                *nums, color_word = rest
            elif len(rest) == 4:
                nums, color_word = rest, "black"
            else:
                raise LevelFormatError("platform takes X Y W H [COLOR]", lineno)
            x, y, w, h = _floats(nums, 4, lineno)
            try:
                color = Color(color_word)
            except ValueError:
                raise LevelFormatError("unknown color %r" % color_word, lineno) from None
            platforms.append(PlatformSpec(x=x, y=y, w=w, h=h, color=color))
        elif word == "diamond":
            x, y = _floats(rest, 2, lineno)
            diamonds.append(DiamondSpec(x=x, y=y))
        else:
            raise LevelFormatError("unknown directive %r" % word, lineno)

    if not saw_header:
        raise LevelFormatError("empty level file")
    if width is None or height is None:
        raise LevelFormatError("missing area directive")
    if time_limit is None:
        raise LevelFormatError("missing time directive")

    return LevelSpec(
        width=width, height=height, time_limit=time_limit,
        circle_spawn=circle, rectangle_spawn=rectangle,
        platforms=tuple(platforms), diamonds=tuple(diamonds), name=name,
    )


def _num(v: float) -> str:
    return "%.17g" % v


def serialize_level(level: LevelSpec) -> str:
    """Canonical text for a level; parse(serialize(x)) == x."""
    lines = [FORMAT_HEADER]
    lines.append("area %s %s" % (_num(level.width), _num(level.height)))
    lines.append("time %s" % _num(level.time_limit))
    if level.circle_spawn is not None:
        lines.append("circle %s %s" % (_num(level.circle_spawn[0]), _num(level.circle_spawn[1])))
    if level.rectangle_spawn is not None:
        lines.append("rectangle %s %s"
                     % (_num(level.rectangle_spawn[0]), _num(level.rectangle_spawn[1])))
    for p in level.platforms:
        lines.append("platform %s %s %s %s %s"
                     % (_num(p.x), _num(p.y), _num(p.w), _num(p.h), p.color.value))
    for d in level.diamonds:
        lines.append("diamond %s %s" % (_num(d.x), _num(d.y)))
    return "\n".join(lines) + "\n"


def level_hash(level: LevelSpec) -> str:
    return hashlib.sha256(serialize_level(level).encode("ascii")).hexdigest()


def load_level(path: str) -> LevelSpec:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    name = path.rsplit("/", 1)[-1]
    if name.endswith(".lvl"):
        name = name[:-4]
    return parse_level(text, name=name)


def save_level(level: LevelSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_level(level))
