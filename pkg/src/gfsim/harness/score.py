"""Run scoring.

A completed run earns the completion bonus scaled by how much of the time
limit was left, plus flat credit per diamond.  An incomplete run keeps the
diamond credit only; since an incomplete run has t = tMax, the two natural
readings (drop the bonus vs. let the time factor zero it) give the same
number, and we implement the first.
"""

from __future__ import annotations

from ..config import ScoreConfig
from ..numfmt import quantize9


class InvalidTime(ValueError):
    pass


def score_run(completed: bool, t: float, t_max: float, n_collect: int,
              sc: ScoreConfig) -> float:
    """Points for one run; pure, quantized to the report precision."""
    if t_max <= 0.0:
        raise InvalidTime("t_max must be positive, got %r" % t_max)
    if not 0.0 <= t <= t_max:
        raise InvalidTime("t=%r outside [0, %r]" % (t, t_max))
    if n_collect < 0:
        raise InvalidTime("n_collect must be >= 0, got %r" % n_collect)
    value = sc.v_collect * n_collect
    if completed:
        value += sc.v_completed * (t_max - t) / t_max
    return quantize9(value)
