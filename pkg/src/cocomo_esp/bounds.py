"""Analytical min/max envelope of the COCOMO-II equation.

With every scale factor at one level ``L`` the exponent is
``Y = b + 0.01 * sum(SF(L))``; letting ``b`` range over ``B_RANGE`` gives an
interval of exponents per level.  The linear extremes are the products of the
per-attribute minimum and maximum effort multipliers.  Everything is derived
from the tuning table; nothing here is a hard-coded result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidGrid, InvalidKloc, OutOfRange
from .model import (
    DEFAULT_PARAMS,
    DEFAULT_TUNINGS,
    EFFORT_MULTIPLIERS,
    SCALE_FACTORS,
    CalibrationParams,
    Rating,
    TuningTable,
)

B_DEFAULT = 0.91
BAKER_A_RANGE = (2.2, 9.18)
UNIFORM_LEVELS = (Rating.VERY_LOW, Rating.LOW, Rating.NOMINAL, Rating.HIGH, Rating.VERY_HIGH)
LOWER = "lower"
UPPER = "upper"


def baker_b(a: float, r: float) -> float:
    """Baker's linear relation between the calibrated ``a`` and ``b``."""
    lo, hi = BAKER_A_RANGE
    if not lo <= a <= hi:
        raise OutOfRange(f"a={a} outside Baker's range [{lo}, {hi}]")
    if not 0 <= r <= 1:
        raise OutOfRange(f"r={r} outside [0, 1]")
    return -0.03 * a + 1.46 + 0.1 * r


def historical_b_range() -> tuple[float, float]:
    """Boehm's default b up to Baker's largest b: (0.91, 1.394)."""
    return B_DEFAULT, baker_b(BAKER_A_RANGE[0], 0.0)


B_RANGE = historical_b_range()


def uniform_sf_sum(level: Rating | int, tunings: TuningTable = DEFAULT_TUNINGS) -> float:
    level = Rating(level)
    return 0.01 * math.fsum(tunings.coefficient(name, level) for name in SCALE_FACTORS)


def exponent_range(level: Rating | int, b_range: tuple[float, float] = B_RANGE,
                   tunings: TuningTable = DEFAULT_TUNINGS) -> tuple[float, float]:
    sf = uniform_sf_sum(level, tunings)
    return b_range[0] + sf, b_range[1] + sf


def em_extremes(tunings: TuningTable = DEFAULT_TUNINGS) -> tuple[float, float]:
    """Products of the smallest and largest defined multiplier of each attribute."""
    lows = [min(tunings.defined(name).values()) for name in EFFORT_MULTIPLIERS]
    highs = [max(tunings.defined(name).values()) for name in EFFORT_MULTIPLIERS]
    return math.prod(lows), math.prod(highs)


def exponent_corners(b_range: tuple[float, float] = B_RANGE,
                     tunings: TuningTable = DEFAULT_TUNINGS) -> tuple[float, float]:
    """Smallest and largest exponent reachable by any rating vector."""
    sf_low = 0.01 * math.fsum(min(tunings.defined(n).values()) for n in SCALE_FACTORS)
    sf_high = 0.01 * math.fsum(max(tunings.defined(n).values()) for n in SCALE_FACTORS)
    return b_range[0] + sf_low, b_range[1] + sf_high


@dataclass(frozen=True)
class LevelBounds:
    level: Rating
    y_min: float
    y_max: float


@dataclass(frozen=True)
class BoundsEnvelope:
    levels: tuple[LevelBounds, ...]
    em_min: float
    em_max: float
    y_min: float
    y_max: float
    b_range: tuple[float, float]

    def level(self, level: Rating | int) -> LevelBounds:
        for lb in self.levels:
            if lb.level == level:
                return lb
        raise KeyError(level)

    @property
    def ratio_coefficient(self) -> float:
        return self.em_max / self.em_min

    @property
    def ratio_exponent(self) -> float:
        return self.y_max - self.y_min


def build_envelope(b_range: tuple[float, float] = B_RANGE,
                   tunings: TuningTable = DEFAULT_TUNINGS) -> BoundsEnvelope:
    levels = tuple(LevelBounds(lv, *exponent_range(lv, b_range, tunings)) for lv in UNIFORM_LEVELS)
    em_min, em_max = em_extremes(tunings)
    y_min, y_max = exponent_corners(b_range, tunings)
    return BoundsEnvelope(levels, em_min, em_max, y_min, y_max, tuple(b_range))


def _check_kloc(kloc: float) -> float:
    kloc = float(kloc)
    if not (kloc > 0 and math.isfinite(kloc)):
        raise InvalidKloc(f"kloc must be > 0, got {kloc}")
    return kloc


def effort_envelope(kloc: float, envelope: BoundsEnvelope | None = None, include_a: bool = False,
                    params: CalibrationParams = DEFAULT_PARAMS) -> tuple[float, float]:
    """Smallest and largest effort the model can produce at ``kloc``.

    Excludes the calibration constant ``a`` unless ``include_a``.  Below
    1 KLOC the smaller exponent gives the larger power, so both corners are
    tried.
    """
    kloc = _check_kloc(kloc)
    env = envelope or build_envelope()
    powers = (kloc ** env.y_min, kloc ** env.y_max)
    scale = params.a if include_a else 1.0
    return scale * env.em_min * min(powers), scale * env.em_max * max(powers)


def sensitivity_ratio(kloc: float, envelope: BoundsEnvelope | None = None) -> float:
    """``(em_max / em_min) * kloc ** (y_max - y_min)``."""
    kloc = _check_kloc(kloc)
    env = envelope or build_envelope()
    return env.ratio_coefficient * kloc ** env.ratio_exponent


@dataclass(frozen=True)
class GrowthCurve:
    label: str
    level: Rating
    bound: str
    exponent: float
    points: tuple[tuple[float, float], ...]


def default_grid(kloc_min: float = 1.0, kloc_max: float = 10_000.0, points: int = 50) -> list[float]:
    """Logarithmically spaced KLOC values."""
    if points < 2:
        raise InvalidGrid("a growth curve needs at least 2 points")
    if not 0 < kloc_min < kloc_max:
        raise InvalidGrid(f"need 0 < kloc_min < kloc_max, got {kloc_min}, {kloc_max}")
    return np.geomspace(kloc_min, kloc_max, points).tolist()


def growth_curves(levels: Sequence[Rating | int] = UNIFORM_LEVELS, bound: str = UPPER,
                  kloc_grid: Sequence[float] | None = None,
                  envelope: BoundsEnvelope | None = None) -> list[GrowthCurve]:
    """``effort = kloc ** Y`` per level, with ``Y`` the lower or upper corner."""
    if bound not in (LOWER, UPPER):
        raise InvalidGrid(f"bound must be {LOWER!r} or {UPPER!r}")
    grid = list(default_grid() if kloc_grid is None else kloc_grid)
    if len(grid) < 2:
        raise InvalidGrid("a growth curve needs at least 2 points")
    if any(k <= 0 for k in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidGrid("kloc grid must be positive and strictly increasing")
    env = envelope or build_envelope()
    curves = []
    for level in levels:
        lb = env.level(Rating(level))
        y = lb.y_min if bound == LOWER else lb.y_max
        name = Rating(level).name.lower().replace("_", " ")
        curves.append(GrowthCurve(
            label=f"{name} / {bound} bound",
            level=Rating(level),
            bound=bound,
            exponent=y,
            points=tuple((float(k), float(k) ** y) for k in grid),
        ))
    return curves
