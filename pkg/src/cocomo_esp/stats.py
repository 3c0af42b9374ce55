"""Ranking of treatment sample sets.

Scott-Knott sorts treatments by median, cuts the sorted list where the
expected squared mean difference ``E(Delta)`` is largest, and recurses on the
two halves only if a bootstrap test *and* the A12 effect size both say the
halves differ.  Ranks increase left to right, one step per accepted cut.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng as rngmod
from .errors import EmptyInput, InputError
from .metrics import iqr, median


@dataclass(frozen=True)
class SkConfig:
    bootstrap_resamples: int = 1000
    confidence: float = 0.99
    a12_threshold: float = 0.6
    rng_seed: int = 0

    def __post_init__(self):
        if not 0 < self.confidence < 1:
            raise InputError("confidence must lie strictly between 0 and 1")
        if not 0.5 <= self.a12_threshold <= 1:
            raise InputError("a12_threshold must lie in [0.5, 1]")
        if self.bootstrap_resamples < 1:
            raise InputError("bootstrap_resamples must be >= 1")


@dataclass(frozen=True)
class RankedGroup:
    label: str
    rank: int
    samples: tuple[float, ...]
    median: float
    iqr: float


def _array(values: Sequence[float], what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise EmptyInput(f"{what} is empty")
    return arr


def a12(m: Sequence[float], n: Sequence[float]) -> float:
    """Vargha-Delaney A12: P(x > y) + 0.5 P(x == y) for x from m, y from n."""
    xs = _array(m, "first sample")
    ys = np.sort(_array(n, "second sample"))
    below = np.searchsorted(ys, xs, side="left")
    at_or_below = np.searchsorted(ys, xs, side="right")
    more = int(below.sum())
    ties = int((at_or_below - below).sum())
    return (more + 0.5 * ties) / (xs.size * ys.size)


def bootstrap_differ(m: Sequence[float], n: Sequence[float], config: SkConfig = SkConfig(),
                     rng: np.random.Generator | None = None) -> bool:
    """Two-sided bootstrap test of equal means.

    Both samples are shifted onto the pooled mean (so the null holds), each is
    resampled with replacement, and the observed mean difference is compared
    against the resampled differences.  Returns True when equality is
    rejected at ``config.confidence``.
    """
    x = _array(m, "first sample")
    y = _array(n, "second sample")
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    observed = abs(x.mean() - y.mean())
    pooled = np.concatenate([x, y]).mean()
    x0 = x - x.mean() + pooled
    y0 = y - y.mean() + pooled
    b = config.bootstrap_resamples
    xs = x0[rng.integers(0, x0.size, size=(b, x0.size))].mean(axis=1)
    ys = y0[rng.integers(0, y0.size, size=(b, y0.size))].mean(axis=1)
    # tolerance keeps a zero observed difference from being beaten by float noise
    extreme = np.abs(xs - ys) >= observed - 1e-12 * max(1.0, abs(pooled))
    p_value = extreme.mean()
    return bool(p_value < 1 - config.confidence)


def best_split(groups: Sequence[Sequence[float]]) -> tuple[int, float]:
    """Cut position (1..k-1) maximizing E(Delta) over ordered ``groups``.

    Ties resolve to the leftmost cut; scores within about 1e-9 (relative) of the
    best so far count as ties so float noise cannot move the cut.
    """
    if len(groups) < 2:
        raise InputError("need at least two groups to split")
    sizes = np.array([len(g) for g in groups], dtype=float)
    sums = np.array([float(np.sum(g)) for g in groups])
    total_n, total_s = sizes.sum(), sums.sum()
    mu = total_s / total_n
    best_cut, best_score = 0, -np.inf
    left_n = left_s = 0.0
    for cut in range(1, len(groups)):
        left_n += sizes[cut - 1]
        left_s += sums[cut - 1]
        right_n, right_s = total_n - left_n, total_s - left_s
        score = (left_n / total_n) * (left_s / left_n - mu) ** 2 + (right_n / total_n) * (right_s / right_n - mu) ** 2
        if best_cut == 0 or score > best_score + 1e-9 * abs(best_score) + 1e-12:
            best_cut, best_score = cut, score
    return best_cut, float(best_score)


def differ(left: Sequence[float], right: Sequence[float], config: SkConfig,
           rng: np.random.Generator | None = None) -> bool:
    """The combined Scott-Knott test: significant *and* not a small effect."""
    effect = a12(left, right)
    if max(effect, 1 - effect) < config.a12_threshold:
        return False
    return bootstrap_differ(left, right, config, rng)


def scott_knott(groups: Sequence[tuple[str, Sequence[float]]], config: SkConfig = SkConfig()) -> list[RankedGroup]:
    if not groups:
        raise EmptyInput("no groups to rank")
    labels = [label for label, _ in groups]
    if len(set(labels)) != len(labels):
        raise InputError("group labels must be unique")
    items = []
    for label, samples in groups:
        arr = _array(samples, f"group {label!r}")
        items.append((median(arr), str(label), arr))
    items.sort(key=lambda t: (t[0], t[1]))
    ranks = [0] * len(items)

    def divide(lo: int, hi: int, rank: int) -> int:
        if hi - lo > 1:
            cut, _ = best_split([items[i][2] for i in range(lo, hi)])
            cut += lo
            left = np.concatenate([items[i][2] for i in range(lo, cut)])
            right = np.concatenate([items[i][2] for i in range(cut, hi)])
            if differ(left, right, config, rngmod.stream(config.rng_seed, lo, cut, hi)):
                last = divide(lo, cut, rank)
                return divide(cut, hi, last + 1)
        for i in range(lo, hi):
            ranks[i] = rank
        return rank

    divide(0, len(items), 1)
    return [
        RankedGroup(label=label, rank=ranks[i], samples=tuple(arr.tolist()), median=med, iqr=iqr(arr))
        for i, (med, label, arr) in enumerate(items)
    ]
