"""Level packs: a directory of levels plus a manifest.

The manifest (``pack.txt``) pins ordering, the intended track, and whether
the pack is public (agents may be tuned against it) or private (evaluation
only).  Bundled packs ship inside the package data.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

from .model import LevelSpec, Track
from .textio import LevelFormatError, load_level, parse_level

MANIFEST_NAME = "pack.txt"
MANIFEST_HEADER = "gf-pack v1"


class PackError(ValueError):
    pass


@dataclass(frozen=True)
class Pack:
    name: str
    track: Track
    visibility: str  # public | private
    levels: tuple[LevelSpec, ...]


def _parse_manifest(text: str) -> tuple[str, Track, str, list[str]]:
    name = track = visibility = None
    files: list[str] = []
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != MANIFEST_HEADER:
        raise PackError("missing '%s' header" % MANIFEST_HEADER)
    for ln in lines[1:]:
        word, _, rest = ln.partition(" ")
        rest = rest.strip()
        if word == "name":
            name = rest
        elif word == "track":
            try:
                track = Track(rest)
            except ValueError:
                raise PackError("unknown track %r" % rest) from None
        elif word == "visibility":
            if rest not in ("public", "private"):
                raise PackError("visibility must be public or private, got %r" % rest)
            visibility = rest
        elif word == "level":
            files.append(rest)
        else:
            raise PackError("unknown manifest directive %r" % word)
    if name is None or track is None or visibility is None or not files:
        raise PackError("manifest needs name, track, visibility and at least one level")
    return name, track, visibility, files


def _check_track(pack_name: str, track: Track, level: LevelSpec) -> None:
    if track not in level.tracks:
        raise PackError(
            "pack %r is a %s pack but level %r supports %s"
            % (pack_name, track.value, level.name,
               ",".join(sorted(t.value for t in level.tracks)) or "nothing")
        )


def load_pack(path: str) -> Pack:
    """Load a pack from a directory containing pack.txt and .lvl files."""
    manifest = os.path.join(path, MANIFEST_NAME)
    if not os.path.isfile(manifest):
        raise PackError("no %s in %s" % (MANIFEST_NAME, path))
    with open(manifest, "r", encoding="utf-8") as fh:
        name, track, visibility, files = _parse_manifest(fh.read())
    levels = []
    for fname in files:
        try:
            level = load_level(os.path.join(path, fname))
        except (OSError, LevelFormatError) as exc:
            raise PackError("pack %r: level %s: %s" % (name, fname, exc)) from exc
        _check_track(name, track, level)
        levels.append(level)
    return Pack(name=name, track=track, visibility=visibility, levels=tuple(levels))


def bundled_pack_names() -> list[str]:
    root = resources.files("gfsim.data") / "packs"
    return sorted(p.name for p in root.iterdir() if p.is_dir())


def load_bundled_pack(name: str) -> Pack:
    root = resources.files("gfsim.data") / "packs" / name
    if not root.is_dir():
        raise PackError("no bundled pack named %r (have: %s)"
                        % (name, ", ".join(bundled_pack_names())))
    text = (root / MANIFEST_NAME).read_text(encoding="utf-8")
    pack_name, track, visibility, files = _parse_manifest(text)
    levels = []
    for fname in files:
        lvl_name = fname[:-4] if fname.endswith(".lvl") else fname
        level = parse_level((root / fname).read_text(encoding="utf-8"), name=lvl_name)
        _check_track(pack_name, track, level)
        levels.append(level)
    return Pack(name=pack_name, track=track, visibility=visibility, levels=tuple(levels))


def resolve_pack(spec: str) -> Pack:
    """Accept either a directory path or a bundled pack name."""
    if os.path.isdir(spec):
        return load_pack(spec)
    return load_bundled_pack(spec)
