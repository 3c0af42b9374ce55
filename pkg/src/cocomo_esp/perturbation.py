"""KLOC noise model and the Monte Carlo size-error study."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .dataset import Dataset
from .errors import InputError, MissingActualEffort
from .metrics import SaConfig, sa_error
from .model import (
    DEFAULT_PARAMS,
    DEFAULT_TUNINGS,
    CalibrationParams,
    TuningTable,
    effort_multiplier_product,
    exponent,
)

KLOC_FLOOR = 0.001
DEFAULT_LEVELS = (0.2, 0.4, 0.6, 0.8, 1.0)

_NOISE_STREAM = 0
_BASELINE_STREAM = 1


def perturb_kloc(kloc, n: float, r):
    """``kloc * ((1 - n) + 2 n r)``, floored at 0.001 KLOC.

    Works elementwise when ``kloc``/``r`` are arrays.
    """
    value = np.maximum(np.multiply(kloc, (1.0 - n) + 2.0 * n * np.asarray(r, dtype=float)), KLOC_FLOOR)
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class NoiseSpec:
    levels: tuple[float, ...] = DEFAULT_LEVELS
    repeats: int = 100
    master_seed: int = 0

    def __post_init__(self):
        levels = tuple(float(n) for n in self.levels)
        if any(not 0 <= n <= 1 for n in levels):
            raise InputError(f"noise levels must lie in [0, 1], got {levels}")
        if self.repeats < 1:
            raise InputError("repeats must be >= 1")
        object.__setattr__(self, "levels", levels)

    def treatments(self) -> list["Treatment"]:
        """Baseline (n=0) first, then each distinct non-zero level in given order."""
        seen = [0.0]
        for n in self.levels:
            if n not in seen:
                seen.append(n)
        return [Treatment.for_level(n) for n in seen]


@dataclass(frozen=True)
class Treatment:
    label: str
    noise_level: float

    @classmethod
    def for_level(cls, n: float) -> "Treatment":
        if n == 0:
            return cls("COCOMO2", 0.0)
        return cls(f"{round(100 * n)}%:COCOMO2", float(n))

    @property
    def stream_key(self) -> int:
        # keyed by level, not position, so adding a level leaves the others unchanged
        return int(round(self.noise_level * 1_000_000))


@dataclass(frozen=True)
class SaSampleSet:
    treatment: Treatment
    samples: tuple[float, ...] = field(repr=False)

    @property
    def label(self) -> str:
        return self.treatment.label


def run_study(
    dataset: Dataset,
    spec: NoiseSpec = NoiseSpec(),
    params: CalibrationParams = DEFAULT_PARAMS,
    tunings: TuningTable = DEFAULT_TUNINGS,
    sa_config: SaConfig = SaConfig(),
    max_workers: int | None = None,
) -> list[SaSampleSet]:
    """One SA value per (treatment, repeat), computed over the whole dataset.

    Ratings stay fixed; only KLOC is perturbed.  Each (treatment, repeat)
    pulls its size noise and its baseline draws from dedicated streams keyed
    off ``spec.master_seed``, with the project index as the position inside
    the noise stream, so the result does not depend on evaluation order.
    """
    missing = [p.id for p in dataset.projects if p.actual_effort is None]
    if missing:
        raise MissingActualEffort(f"projects without actual effort: {', '.join(missing[:5])}")

    kloc = np.array([p.kloc for p in dataset.projects])
    actual = np.array([p.actual_effort for p in dataset.projects])
    linear = params.a * np.array([effort_multiplier_product(p, tunings) for p in dataset.projects])
    power = np.array([exponent(p, params, tunings) for p in dataset.projects])

    def one(treatment: Treatment, repeat: int) -> float:
        key = treatment.stream_key
        r = rngmod.stream(spec.master_seed, key, repeat, _NOISE_STREAM).random(kloc.size)
        noisy = perturb_kloc(kloc, treatment.noise_level, r)
        predicted = linear * noisy ** power
        baseline = rngmod.stream(spec.master_seed, key, repeat, _BASELINE_STREAM)
        return sa_error(actual, predicted, actual, sa_config, rng=baseline)

    treatments = spec.treatments()
    jobs = [(t, rep) for t in treatments for rep in range(spec.repeats)]
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            values = list(pool.map(lambda job: one(*job), jobs))
    else:
        values = [one(t, rep) for t, rep in jobs]

    out = []
    for i, t in enumerate(treatments):
        chunk = values[i * spec.repeats:(i + 1) * spec.repeats]
        out.append(SaSampleSet(t, tuple(chunk)))
    return out
