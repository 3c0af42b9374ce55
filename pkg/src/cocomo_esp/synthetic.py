"""Synthetic project data with known ground truth.

``cocomo2_dataset`` draws projects whose efforts come from the COCOMO-II
equation itself (optionally with log-normal noise); it backs the calibration
recovery checks.

``cocomo81_standin`` builds a COCOMO-81-format stand-in for the public COC81
data that cannot be shipped here.  Its efforts come from the COCOMO-81
*intermediate* model (mode-specific a/b and the 1981 multipliers), not from
COCOMO-II, so COCOMO-II estimates on it carry a realistic model mismatch.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import rng as rngmod
from .dataset import COC81_ATTRIBUTES, COC81_MULTIPLIERS, Dataset
from .model import (
    ATTRIBUTES,
    DEFAULT_TUNINGS,
    EFFORT_MULTIPLIERS,
    SCALE_FACTORS,
    CalibrationParams,
    Project,
    Rating,
    TuningTable,
    estimate_effort,
)

# preference for each level vl..xh before masking out undefined cells
_LEVEL_WEIGHTS = np.array([1.0, 2.0, 4.0, 2.0, 1.0, 0.5])

# COCOMO-81 intermediate mode coefficients (a, b) and mode mix
COC81_MODES = {"organic": (3.2, 1.05), "semidetached": (3.0, 1.12), "embedded": (2.8, 1.20)}
_MODE_MIX = {"organic": 23, "semidetached": 12, "embedded": 28}


def _pick(rng: np.random.Generator, defined: Sequence[bool]) -> Rating:
    w = _LEVEL_WEIGHTS * np.asarray(defined, dtype=float)
    return Rating(int(rng.choice(6, p=w / w.sum())) + 1)


def random_project(rng: np.random.Generator, id: str, kloc: float,
                   tunings: TuningTable = DEFAULT_TUNINGS) -> Project:
    """Ratings drawn only from cells ``tunings`` defines."""
    ratings = {name: _pick(rng, [tunings.is_defined(name, r) for r in Rating]) for name in ATTRIBUTES}
    return Project(
        id=id,
        kloc=kloc,
        sf_ratings={k: ratings[k] for k in SCALE_FACTORS},
        em_ratings={k: ratings[k] for k in EFFORT_MULTIPLIERS},
    )


def cocomo2_dataset(n: int = 50, params: CalibrationParams = CalibrationParams(), sigma: float = 0.0,
                    seed: int = 0, kloc_range: tuple[float, float] = (2.0, 1000.0),
                    tunings: TuningTable = DEFAULT_TUNINGS, name: str = "synthetic") -> Dataset:
    """Projects whose actual effort is the model estimate times ``exp(N(0, sigma))``."""
    rng = rngmod.stream(seed, 2)
    lo, hi = kloc_range
    projects = []
    for i in range(n):
        kloc = float(math.exp(rng.uniform(math.log(lo), math.log(hi))))
        p = random_project(rng, f"s{i + 1:03d}", kloc, tunings)
        effort = estimate_effort(p, params, tunings) * math.exp(rng.normal(0.0, sigma)) if sigma else estimate_effort(p, params, tunings)
        projects.append(Project(p.id, p.kloc, p.sf_ratings, p.em_ratings, effort))
    return Dataset(tuple(projects), name=name)


def cocomo81_standin(seed: int = 81, n: int = 63, sigma: float = 0.2,
                     kloc_range: tuple[float, float] = (2.0, 1150.0)) -> list[dict]:
    """COCOMO-81 rating records (rating ints, kloc, effort, id, mode)."""
    rng = rngmod.stream(seed, 81)
    modes = list(_MODE_MIX)
    mix = np.array([_MODE_MIX[m] for m in modes], dtype=float)
    lo, hi = kloc_range
    records = []
    for i in range(n):
        mode = modes[int(rng.choice(len(modes), p=mix / mix.sum()))]
        kloc = round(float(math.exp(rng.uniform(math.log(lo), math.log(hi)))), 2)
        rec: dict = {"id": f"c81-{i + 1:02d}", "mode": mode, "kloc": kloc}
        eaf = 1.0
        for attribute in COC81_ATTRIBUTES:
            cells = COC81_MULTIPLIERS[attribute]
            level = _pick(rng, [c is not None for c in cells])
            rec[attribute] = int(level)
            eaf *= cells[level - 1]
        a, b = COC81_MODES[mode]
        rec["effort"] = round(a * eaf * kloc ** b * math.exp(rng.normal(0.0, sigma)), 1)
        records.append(rec)
    return records


def standin_csv(records: Sequence[dict]) -> str:
    cols = ["id", *COC81_ATTRIBUTES, "kloc", "effort"]
    lines = [
        "# SYNTHETIC stand-in for the public COC81 data (not the real projects).",
        "# Generated by cocomo_esp.synthetic.cocomo81_standin(seed=81): COCOMO-81",
        "# intermediate model, organic/semidetached/embedded mix, log-normal noise 0.2.",
        ",".join(cols),
    ]
    for rec in records:
        lines.append(",".join(str(rec[c]) for c in cols))
    return "\n".join(lines) + "\n"
