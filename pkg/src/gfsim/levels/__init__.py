from .model import Color, DiamondSpec, LevelSpec, PlatformSpec, Track
from .packs import Pack, PackError, bundled_pack_names, load_bundled_pack, load_pack, resolve_pack
from .textio import (
    LevelFormatError,
    level_hash,
    load_level,
    parse_level,
    save_level,
    serialize_level,
)
from .validate import ValidationReport, validate_level

__all__ = [
    "Color", "DiamondSpec", "LevelFormatError", "LevelSpec", "Pack", "PackError",
    "PlatformSpec", "Track", "ValidationReport", "bundled_pack_names", "level_hash",
    "load_bundled_pack", "load_level", "load_pack", "parse_level", "resolve_pack",
    "save_level", "serialize_level", "validate_level",
]
