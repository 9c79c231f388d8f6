"""Time-weighted coverage score: integral of weight(t) * covered_fraction(t).

Traces are piecewise constant and both weight families have elementary
antiderivatives, so every segment integrates in closed form; no quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import WeightFunction
from .simulator import CoverageTrace


@dataclass(frozen=True)
class WeightedScore:
    """Integral value plus the per-segment contributions that sum to it."""

    c_w: float
    contributions: tuple[float, ...]


def segment_weight_integral(w: WeightFunction, a: float, b: float) -> float:
    """Integral of the weight over [a, b], closed form.

    Constant weight gives b - a; exponential decay with rate alpha gives
    (exp(-alpha*a) - exp(-alpha*b)) / alpha, evaluated via expm1 so the
    alpha -> 0 limit stays exact.
    """
    if a < 0 or a > b:
        raise ValueError(f"invalid segment [{a}, {b}]: need 0 <= a <= b")
    if w.kind == "constant" or w.alpha == 0.0:
        return b - a
    return math.exp(-w.alpha * a) * -math.expm1(-w.alpha * (b - a)) / w.alpha


def time_weighted_coverage(trace: CoverageTrace, w: WeightFunction) -> WeightedScore:
    """Score a coverage trace under a weight function.

    Exact up to floating rounding since the trace is piecewise constant.
    Malformed traces (gaps, overlaps, inverted segments) are rejected.
    """
    problems = trace.violations()
    if problems:
        raise ValueError("malformed trace: " + "; ".join(problems))
    contributions = tuple(
        seg.fraction * segment_weight_integral(w, seg.t_start, seg.t_end)
        for seg in trace.segments
    )
    return WeightedScore(c_w=math.fsum(contributions), contributions=contributions)
