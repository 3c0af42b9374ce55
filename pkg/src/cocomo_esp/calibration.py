"""Local calibration of (a, b) and resampled calibration studies."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .dataset import Dataset
from .errors import InputError, MissingActualEffort, Underdetermined
from .model import DEFAULT_TUNINGS, CalibrationParams, TuningTable, effort_multiplier_product, scale_factor_sum


def _design(dataset: Dataset, tunings: TuningTable) -> tuple[np.ndarray, np.ndarray]:
    xs, zs = [], []
    for p in dataset.projects:
        if p.actual_effort is None:
            raise MissingActualEffort(f"project {p.id} has no actual effort")
        x = math.log(p.kloc)
        z = math.log(p.actual_effort) - math.log(effort_multiplier_product(p, tunings)) - scale_factor_sum(p, tunings) * x
        xs.append(x)
        zs.append(z)
    return np.array(xs), np.array(zs)


def _fit(x: np.ndarray, z: np.ndarray) -> CalibrationParams:
    if x.size < 2 or np.unique(x).size < 2:
        raise Underdetermined("need at least two projects with distinct kloc")
    xc = x - x.mean()
    b = float(np.dot(xc, z - z.mean()) / np.dot(xc, xc))
    ln_a = float(z.mean() - b * x.mean())
    return CalibrationParams(a=math.exp(ln_a), b=b)


def calibrate(dataset: Dataset, tunings: TuningTable = DEFAULT_TUNINGS) -> CalibrationParams:
    """Ordinary least squares of ``ln(effort / EM) - 0.01 SF ln(kloc)`` on ``ln(kloc)``."""
    x, z = _design(dataset, tunings)
    return _fit(x, z)


def log_residual_ss(dataset: Dataset, params: CalibrationParams, tunings: TuningTable = DEFAULT_TUNINGS) -> float:
    x, z = _design(dataset, tunings)
    return float(np.sum((z - math.log(params.a) - params.b * x) ** 2))


@dataclass(frozen=True)
class CalibrationStudy:
    samples: tuple[CalibrationParams, ...]
    holdout_fraction: float
    repeats: int
    rng_seed: int

    def __post_init__(self):
        if len(self.samples) != self.repeats:
            raise InputError("one calibration sample per repeat expected")

    @property
    def a_values(self) -> list[float]:
        return [s.a for s in self.samples]

    @property
    def b_values(self) -> list[float]:
        return [s.b for s in self.samples]


def calibration_study(dataset: Dataset, repeats: int = 30, holdout: float = 0.9, seed: int = 0,
                      tunings: TuningTable = DEFAULT_TUNINGS) -> CalibrationStudy:
    """Refit on ``floor(holdout * n)`` projects drawn without replacement, ``repeats`` times."""
    if repeats < 1:
        raise InputError("repeats must be >= 1")
    if not 0 < holdout <= 1:
        raise InputError("holdout must lie in (0, 1]")
    x, z = _design(dataset, tunings)
    size = math.floor(holdout * x.size)
    samples = []
    for i in range(repeats):
        idx = rngmod.stream(seed, i).choice(x.size, size=size, replace=False)
        idx.sort()
        try:
            samples.append(_fit(x[idx], z[idx]))
        except Underdetermined as exc:
            raise Underdetermined(str(exc), resample=i) from None
    return CalibrationStudy(tuple(samples), holdout, repeats, seed)
