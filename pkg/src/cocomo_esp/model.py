"""COCOMO-II attribute system and effort equation.

    effort = a * prod(EM_i) * kloc ** (b + 0.01 * sum(SF_j))

Ratings are kept symbolic on :class:`Project` and only resolved against a
:class:`TuningTable` when an estimate is computed, so alternative tunings can
be swapped in without touching the project data.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import InvalidKloc, InvalidRating, InputError, UndefinedTuningCell


class Rating(enum.IntEnum):
    VERY_LOW = 1
    LOW = 2
    NOMINAL = 3
    HIGH = 4
    VERY_HIGH = 5
    EXTRA_HIGH = 6

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    @classmethod
    def parse(cls, token: "str | int | Rating") -> "Rating":
        """Accept ``1``..``6``, ``"3"`` or one of vl/l/n/h/vh/xh (any case)."""
        if isinstance(token, Rating):
            return token
        if isinstance(token, int) and not isinstance(token, bool):
            if 1 <= token <= 6:
                return cls(token)
            raise InvalidRating(f"rating {token} outside 1..6")
        text = str(token).strip().lower()
        if text in _FROM_SYMBOL:
            return _FROM_SYMBOL[text]
        if text.isdigit() and 1 <= int(text) <= 6:
            return cls(int(text))
        raise InvalidRating(f"unknown rating {token!r}")


_SYMBOLS = {
    Rating.VERY_LOW: "vl",
    Rating.LOW: "l",
    Rating.NOMINAL: "n",
    Rating.HIGH: "h",
    Rating.VERY_HIGH: "vh",
    Rating.EXTRA_HIGH: "xh",
}
_FROM_SYMBOL = {v: k for k, v in _SYMBOLS.items()}


class AttributeKind(enum.Enum):
    SCALE_FACTOR = "scale_factor"
    EFFORT_MULTIPLIER = "effort_multiplier"


SCALE_FACTORS: tuple[str, ...] = ("flex", "pmat", "prec", "resl", "team")
EFFORT_MULTIPLIERS: tuple[str, ...] = (
    "acap", "aexp", "cplx", "data", "docu", "ltex", "pcap", "pcon", "plex",
    "pvol", "rely", "ruse", "sced", "site", "stor", "time", "tool",
)
ATTRIBUTES: tuple[str, ...] = SCALE_FACTORS + EFFORT_MULTIPLIERS


def attribute_kind(name: str) -> AttributeKind:
    if name in SCALE_FACTORS:
        return AttributeKind.SCALE_FACTOR
    if name in EFFORT_MULTIPLIERS:
        return AttributeKind.EFFORT_MULTIPLIER
    raise InputError(f"unknown COCOMO-II attribute {name!r}")


_ = None
# vl, l, n, h, vh, xh
_COC2_ROWS: dict[str, tuple[float | None, ...]] = {
    "flex": (5.07, 4.05, 3.04, 2.03, 1.01, _),
    "pmat": (7.80, 6.24, 4.68, 3.12, 1.56, _),
    "prec": (6.20, 4.96, 3.72, 2.48, 1.24, _),
    "resl": (7.07, 5.65, 4.24, 2.83, 1.41, _),
    "team": (5.48, 4.38, 3.29, 2.19, 1.01, _),
    "acap": (1.42, 1.19, 1.00, 0.85, 0.71, _),
    "aexp": (1.22, 1.10, 1.00, 0.88, 0.81, _),
    "cplx": (0.73, 0.87, 1.00, 1.17, 1.34, 1.74),
    "data": (_, 0.90, 1.00, 1.14, 1.28, _),
    "docu": (0.81, 0.91, 1.00, 1.11, 1.23, _),
    "ltex": (1.20, 1.09, 1.00, 0.91, 0.84, _),
    "pcap": (1.34, 1.15, 1.00, 0.88, 0.76, _),
    "pcon": (1.29, 1.12, 1.00, 0.90, 0.81, _),
    "plex": (1.19, 1.09, 1.00, 0.91, 0.85, _),
    "pvol": (_, 0.87, 1.00, 1.15, 1.30, _),
    "rely": (0.82, 0.92, 1.00, 1.10, 1.26, _),
    "ruse": (_, 0.95, 1.00, 1.07, 1.15, 1.24),
    "sced": (1.43, 1.14, 1.00, 1.00, 1.00, _),
    "site": (1.22, 1.09, 1.00, 0.93, 0.86, 0.80),
    "stor": (_, _, 1.00, 1.05, 1.17, 1.46),
    "time": (_, _, 1.00, 1.11, 1.29, 1.63),
    "tool": (1.17, 1.09, 1.00, 0.90, 0.78, _),
}


class TuningTable:
    """Rating -> coefficient lookup per attribute; some cells are undefined."""

    def __init__(self, entries: Mapping[tuple[str, Rating], float]):
        cells: dict[str, dict[Rating, float]] = {name: {} for name in ATTRIBUTES}
        for (name, rating), value in entries.items():
            attribute_kind(name)
            cells[name][Rating.parse(rating)] = float(value)
        self._cells = cells
        self._validate()

    @classmethod
    def from_rows(cls, rows: Mapping[str, Iterable[float | None]]) -> "TuningTable":
        entries = {}
        for name, values in rows.items():
            for level, value in zip(Rating, values):
                if value is not None:
                    entries[(name, level)] = value
        return cls(entries)

    def _validate(self) -> None:
        for name, cells in self._cells.items():
            if not cells:
                raise InputError(f"tuning table has no cells for {name}")
            for rating, value in cells.items():
                if not value > 0:
                    raise InputError(f"non-positive coefficient {value} for {name}/{rating.name}")
            if name in EFFORT_MULTIPLIERS and cells.get(Rating.NOMINAL) != 1.0:
                raise InputError(f"effort multiplier {name} must be 1.00 at nominal")
            if name in SCALE_FACTORS:
                ordered = [cells[r] for r in sorted(cells)]
                if any(b > a for a, b in zip(ordered, ordered[1:])):
                    raise InputError(f"scale factor {name} must be non-increasing with rating")

    def coefficient(self, name: str, rating: Rating | int) -> float:
        try:
            return self._cells[name][Rating(rating)]
        except KeyError:
            raise UndefinedTuningCell(name, int(rating)) from None

    def is_defined(self, name: str, rating: Rating | int) -> bool:
        return Rating(rating) in self._cells.get(name, {})

    def defined(self, name: str) -> dict[Rating, float]:
        """Defined cells of one attribute, ordered by rating."""
        return dict(sorted(self._cells[name].items()))

    def entries(self) -> dict[tuple[str, Rating], float]:
        return {(n, r): v for n, cells in self._cells.items() for r, v in cells.items()}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TuningTable) and self._cells == other._cells

    def __repr__(self) -> str:
        n = sum(len(c) for c in self._cells.values())
        return f"TuningTable({n} cells)"


DEFAULT_TUNINGS = TuningTable.from_rows(_COC2_ROWS)


@dataclass(frozen=True)
class CalibrationParams:
    a: float = 2.94
    b: float = 0.91

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise InputError(f"calibration constant a must be positive, got {self.a}")
        if not math.isfinite(self.b):
            raise InputError(f"calibration exponent b must be finite, got {self.b}")


DEFAULT_PARAMS = CalibrationParams()


@dataclass(frozen=True)
class Project:
    id: str
    kloc: float
    sf_ratings: Mapping[str, Rating]
    em_ratings: Mapping[str, Rating]
    actual_effort: float | None = None

    def __post_init__(self):
        sf = {k: Rating.parse(v) for k, v in self.sf_ratings.items()}
        em = {k: Rating.parse(v) for k, v in self.em_ratings.items()}
        if set(sf) != set(SCALE_FACTORS):
            raise InputError(f"project {self.id}: scale factors must be exactly {SCALE_FACTORS}")
        if set(em) != set(EFFORT_MULTIPLIERS):
            raise InputError(f"project {self.id}: effort multipliers must be exactly {EFFORT_MULTIPLIERS}")
        kloc = float(self.kloc)
        if not (kloc > 0 and math.isfinite(kloc)):
            raise InvalidKloc(f"project {self.id}: kloc must be > 0, got {self.kloc}")
        actual = self.actual_effort
        if actual is not None:
            actual = float(actual)
            if not (actual > 0 and math.isfinite(actual)):
                raise InputError(f"project {self.id}: actual effort must be > 0, got {self.actual_effort}")
        object.__setattr__(self, "sf_ratings", {k: sf[k] for k in SCALE_FACTORS})
        object.__setattr__(self, "em_ratings", {k: em[k] for k in EFFORT_MULTIPLIERS})
        object.__setattr__(self, "kloc", kloc)
        object.__setattr__(self, "actual_effort", actual)
        object.__setattr__(self, "id", str(self.id))

    @classmethod
    def uniform(cls, id: str, kloc: float, level: Rating | int = Rating.NOMINAL,
                actual_effort: float | None = None, **overrides) -> "Project":
        """Project with every attribute at ``level``, except ``overrides``."""
        level = Rating.parse(level)
        ratings = {name: Rating.parse(overrides.pop(name, level)) for name in ATTRIBUTES}
        if overrides:
            raise InputError(f"unknown attributes {sorted(overrides)}")
        return cls(
            id=id,
            kloc=kloc,
            sf_ratings={k: ratings[k] for k in SCALE_FACTORS},
            em_ratings={k: ratings[k] for k in EFFORT_MULTIPLIERS},
            actual_effort=actual_effort,
        )

    @property
    def ratings(self) -> dict[str, Rating]:
        return {**self.sf_ratings, **self.em_ratings}

    def with_kloc(self, kloc: float) -> "Project":
        return Project(self.id, kloc, self.sf_ratings, self.em_ratings, self.actual_effort)


def scale_factor_sum(project: Project, tunings: TuningTable = DEFAULT_TUNINGS) -> float:
    """``0.01 * sum(SF)``, the part of the exponent contributed by scale factors."""
    return 0.01 * math.fsum(tunings.coefficient(n, r) for n, r in project.sf_ratings.items())


def effort_multiplier_product(project: Project, tunings: TuningTable = DEFAULT_TUNINGS) -> float:
    return math.prod(tunings.coefficient(n, r) for n, r in project.em_ratings.items())


def exponent(project: Project, params: CalibrationParams = DEFAULT_PARAMS,
             tunings: TuningTable = DEFAULT_TUNINGS) -> float:
    return params.b + scale_factor_sum(project, tunings)


def estimate_effort(project: Project, params: CalibrationParams = DEFAULT_PARAMS,
                    tunings: TuningTable = DEFAULT_TUNINGS, kloc: float | None = None) -> float:
    """Effort in person-months (152 h each).

    ``kloc`` overrides the project's size without rebuilding the project,
    which is how the perturbation study feeds in noisy sizes.
    """
    size = project.kloc if kloc is None else float(kloc)
    if not size > 0:
        raise InvalidKloc(f"project {project.id}: kloc must be > 0, got {size}")
    em = effort_multiplier_product(project, tunings)
    return params.a * em * size ** exponent(project, params, tunings)
