"""Exponent estimates from a prefix of the SPF series.

Both methods fit a line to points ``(t, K(t))`` for ``t`` between the end
of the initial stagnation ``l0`` and a cut-off ``t'`` and report where
that line reaches 1.  ``r1`` interpolates the two end points, ``r2`` is the
ordinary least-squares line over every point in the window.  Everything
is exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .automata import ExponentBounds, aut_of, eppstein, sg_diameter
from .boolmat import MatrixSet
from .spf import SpfSeries, stagnations

__all__ = [
    "SCHEDULES",
    "ApproxConfig",
    "ApproxResult",
    "DegenerateFitError",
    "tprime",
    "r1_estimate",
    "r2_estimate",
    "estimate",
    "BoundsVerdict",
    "evaluate_against_bounds",
]

# multiplier of log n for each named t' schedule
SCHEDULES = {"log": Fraction(1), "1.5log": Fraction(3, 2), "2log": Fraction(2)}


class DegenerateFitError(ValueError):
    """The fitted line is flat, so it never reaches 1."""


def tprime(n: int, schedule: Union[str, int], l0: int = 0, base: float = math.e) -> int:
    """Resolve a t' schedule.

    An integer is taken literally.  A named schedule gives
    ``l0 + ceil(c * log(n))`` so the window always extends past the
    initial stagnation.
    """
    if isinstance(schedule, int):
        return schedule
    if isinstance(schedule, str) and schedule.lstrip("-").isdigit():
        return int(schedule)
    try:
        c = SCHEDULES[schedule]
    except KeyError:
        raise ValueError(f"unknown t' schedule {schedule!r}; use an integer or one of {sorted(SCHEDULES)}") from None
    return l0 + max(1, math.ceil(float(c) * math.log(n, base)))


@dataclass(frozen=True)
class ApproxConfig:
    method: str = "r1"
    schedule: Union[str, int] = "2log"
    log_base: float = math.e

    def __post_init__(self):
        if self.method not in ("r1", "r2"):
            raise ValueError(f"method must be r1 or r2, got {self.method!r}")


@dataclass(frozen=True)
class ApproxResult:
    method: str
    estimate: Fraction
    slope: Fraction
    intercept: Fraction
    l0: int
    tprime: int

    def line(self, t) -> Fraction:
        return self.slope * t + self.intercept


def _window(series: SpfSeries | Sequence[Fraction], l0: int, tp: int) -> list[tuple[int, Fraction]]:
    values = series.values if isinstance(series, SpfSeries) else tuple(series)
    if not 0 <= l0 < tp:
        raise ValueError(f"need 0 <= l0 < t', got l0={l0}, t'={tp}")
    if tp >= len(values):
        raise ValueError(f"series has no value at t'={tp} (last t is {len(values) - 1})")
    return [(t, Fraction(values[t])) for t in range(l0, tp + 1)]


def _result(method, slope, intercept, l0, tp) -> ApproxResult:
    if slope <= 0:
        raise DegenerateFitError(f"{method}: fitted slope {slope} is not positive")
    return ApproxResult(method, (1 - intercept) / slope, slope, intercept, l0, tp)


def r1_estimate(series, l0: int, tp: int) -> ApproxResult:
    pts = _window(series, l0, tp)
    (t0, k0), (t1, k1) = pts[0], pts[-1]
    slope = (k1 - k0) / (t1 - t0)
    return _result("r1", slope, k0 - slope * t0, l0, tp)


def r2_estimate(series, l0: int, tp: int) -> ApproxResult:
    pts = _window(series, l0, tp)
    N = len(pts)
    sx = sum(Fraction(t) for t, _ in pts)
    sy = sum(k for _, k in pts)
    sxx = sum(Fraction(t * t) for t, _ in pts)
    sxy = sum(t * k for t, k in pts)
    slope = (N * sxy - sx * sy) / (N * sxx - sx * sx)
    return _result("r2", slope, (sy - slope * sx) / N, l0, tp)


def estimate(series: SpfSeries, config: ApproxConfig = ApproxConfig(),
             l0: Optional[int] = None) -> ApproxResult:
    """Apply ``config`` to a K series, taking ``l0`` from the series unless given."""
    if l0 is None:
        l0 = stagnations(series).l0
    tp = tprime(series.n, config.schedule, l0, config.log_base)
    fit = r1_estimate if config.method == "r1" else r2_estimate
    return fit(series, l0, tp)


@dataclass(frozen=True)
class BoundsVerdict:
    estimate: Fraction
    lower: int
    upper: int
    above_lower: bool
    below_upper: bool
    exponent: Optional[int] = None

    @property
    def within(self) -> bool:
        return self.above_lower and self.below_upper


def evaluate_against_bounds(M: MatrixSet, result: ApproxResult, *,
                            bounds: Optional[ExponentBounds] = None,
                            exponent: Optional[int] = None) -> BoundsVerdict:
    """Compare an estimate with diam(SG(Aut(M))) below and
    Epp(Aut(M)) + Epp(Aut(M^T)) + n - 1 above."""
    if bounds is not None:
        lower, upper = bounds.diameter, bounds.upper
    else:
        lower = sg_diameter(aut_of(M))
        upper = eppstein(aut_of(M)).rt + eppstein(aut_of(M.transpose())).rt + M.n - 1
    return BoundsVerdict(result.estimate, lower, upper,
                         result.estimate >= lower, result.estimate <= upper, exponent)
