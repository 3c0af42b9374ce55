"""Standardized accuracy (SA) and the percentile summaries used in reports.

SA here is the ratio form, in percent::

    SA = 100 * sum_i |actual_i - predicted_i|
             / sum_i mean_j |choice(all) - predicted_i|

so 0 is a perfect estimate and 100 is "as bad as guessing a random actual".
Lower is better.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyInput, InputError, LengthMismatch, ZeroDenominator

LITERAL = "literal"
CONVENTIONAL = "conventional"


@dataclass(frozen=True)
class SaConfig:
    """Baseline settings.

    ``variant="literal"`` measures the random guess against the prediction
    under test; ``"conventional"`` measures it against the actual value
    (Shepperd & MacDonell).  ``exhaustive=True`` replaces the random draws by
    the exact mean over every value of ``all_efforts``.
    """

    baseline_draws: int = 1000
    rng_seed: int = 0
    variant: str = LITERAL
    exhaustive: bool = False

    def __post_init__(self):
        if self.baseline_draws < 1:
            raise InputError("baseline_draws must be >= 1")
        if self.variant not in (LITERAL, CONVENTIONAL):
            raise InputError(f"unknown SA variant {self.variant!r}")


def sa_error(
    actuals: Sequence[float],
    predictions: Sequence[float],
    all_efforts: Sequence[float],
    config: SaConfig = SaConfig(),
    rng: np.random.Generator | None = None,
) -> float:
    actual = np.asarray(actuals, dtype=float)
    predicted = np.asarray(predictions, dtype=float)
    pool = np.asarray(all_efforts, dtype=float)
    if actual.ndim != 1 or actual.shape != predicted.shape:
        raise LengthMismatch(f"{actual.size} actuals vs {predicted.size} predictions")
    if actual.size == 0:
        raise EmptyInput("no projects to score")
    if pool.size == 0:
        raise EmptyInput("all_efforts is empty")

    reference = predicted if config.variant == LITERAL else actual
    if config.exhaustive:
        guess_error = np.abs(pool[None, :] - reference[:, None]).mean(axis=1)
    else:
        if rng is None:
            rng = np.random.default_rng(config.rng_seed)
        picks = pool[rng.integers(0, pool.size, size=(actual.size, config.baseline_draws))]
        guess_error = np.abs(picks - reference[:, None]).mean(axis=1)

    numerator = np.abs(actual - predicted).sum()
    denominator = guess_error.sum()
    if denominator == 0:
        raise ZeroDenominator("random-guess baseline has zero error; SA undefined")
    return float(100.0 * numerator / denominator)


def _nonempty(values: Sequence[float]) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise EmptyInput("percentile of an empty list")
    return arr


def percentile(values: Sequence[float], q: float) -> float:
    """Linear interpolation between closest ranks."""
    return float(np.percentile(_nonempty(values), q))


def median(values: Sequence[float]) -> float:
    return percentile(values, 50)


def iqr(values: Sequence[float]) -> float:
    arr = _nonempty(values)
    q25, q75 = np.percentile(arr, [25, 75])
    return float(q75 - q25)
