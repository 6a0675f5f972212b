"""Nine-significant-digit float policy for reports and replays.

Values are quantized once where they are produced, so everything written,
compared, or re-read later round-trips exactly through ``%.9g`` text.
"""

from __future__ import annotations


def format9(value: float) -> str:
    return "%.9g" % value


def quantize9(value: float) -> float:
    return float(format9(value))
