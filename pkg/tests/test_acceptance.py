"""Acceptance gate, one test per criterion.

The hook in conftest.py turns these into PASS/FAIL lines.  Each test records a
short ``detail`` string with the measured values.
"""
import math
import os
import random

import numpy as np
import pytest

from cocomo_esp import rng as rngmod
from cocomo_esp.bounds import (
    LOWER,
    UNIFORM_LEVELS,
    UPPER,
    baker_b,
    build_envelope,
    em_extremes,
    exponent_range,
    growth_curves,
    sensitivity_ratio,
)
from cocomo_esp.calibration import calibrate
from cocomo_esp.dataset import (
    COCOMO81,
    PRE_CODING,
    bundled_path,
    load_dataset,
    load_size_errors,
    size_error_summary,
)
from cocomo_esp.metrics import SaConfig, median, sa_error
from cocomo_esp.model import DEFAULT_TUNINGS, SCALE_FACTORS, CalibrationParams, Rating
from cocomo_esp.perturbation import DEFAULT_LEVELS, KLOC_FLOOR, NoiseSpec, perturb_kloc, run_study
from cocomo_esp.report import perturbation_table
from cocomo_esp.stats import SkConfig, a12, bootstrap_differ, differ, scott_knott
from cocomo_esp.synthetic import cocomo2_dataset

from test_model import reference_cells
from test_stats import e_delta, pair_a12

pytestmark = pytest.mark.acceptance

PRINTED_SF_SUMS = {Rating.VERY_LOW: 0.32, Rating.LOW: 0.25, Rating.NOMINAL: 0.192,
                   Rating.HIGH: 0.13, Rating.VERY_HIGH: 0.06}
PRINTED_Y = {Rating.VERY_LOW: (1.22, 1.71), Rating.LOW: (1.16, 1.65), Rating.NOMINAL: (1.10, 1.58),
             Rating.HIGH: (1.04, 1.52), Rating.VERY_HIGH: (0.97, 1.46)}


def test_criterion_01_table_fidelity(record_property):
    expected = reference_cells()
    actual = {(n, int(r)): v for (n, r), v in DEFAULT_TUNINGS.entries().items()}
    assert actual == expected
    sums = {lv: 0.01 * sum(expected[(n, int(lv))] for n in SCALE_FACTORS) for lv in PRINTED_SF_SUMS}
    record_property("detail", "sums " + " ".join(f"{sums[lv]:.4f}" for lv in PRINTED_SF_SUMS))
    for lv, printed in PRINTED_SF_SUMS.items():
        assert abs(sums[lv] - printed) <= 0.005, lv


def test_criterion_02_envelope_constants(record_property):
    em_min, em_max = em_extremes()
    ratio = sensitivity_ratio(1)
    record_property("detail", f"em_min={em_min:.5f} em_max={em_max:.4f} ratio={ratio:.1f}")
    assert em_min == pytest.approx(0.057, rel=0.005)
    assert em_max == pytest.approx(115.6, rel=0.005)
    assert ratio == pytest.approx(2028, rel=0.005)


def test_criterion_03_exponent_corners(record_property):
    misses = []
    for lv, printed in PRINTED_Y.items():
        got = exponent_range(lv)
        for side, g, p in zip(("min", "max"), got, printed):
            if abs(g - p) > 0.005:
                misses.append(f"{lv.name.lower()} {side} {g:.4f} vs {p}")
    b_hi, b_lo = round(baker_b(2.2, 0), 10), round(baker_b(9.18, 1), 10)
    record_property("detail", f"baker {b_hi} {b_lo}; " + ("; ".join(misses) or "all ten within 0.005"))
    assert b_hi == 1.394 and b_lo == 1.2846
    assert not misses


def coc81_source():
    path = os.environ.get("ESP_COC81")
    if path:
        return load_dataset(path, format=COCOMO81), f"real COC81 from {path}"
    return load_dataset(bundled_path("coc81_standin.csv"), format=COCOMO81), "SYNTHETIC stand-in, not real COC81"


def test_criterion_04_noise_trend(record_property):
    dataset, source = coc81_source()
    runs = 20
    same_rank = 0
    increases = []
    for seed in range(runs):
        sets = run_study(dataset, NoiseSpec(DEFAULT_LEVELS, repeats=100, master_seed=seed),
                         sa_config=SaConfig(rng_seed=seed))
        by_level = {s.treatment.noise_level: s for s in sets}
        increases.append(median(by_level[1.0].samples) - median(by_level[0.0].samples))
        table = perturbation_table(sets, SkConfig(rng_seed=seed))
        med_rank = {row[0]: row[1] for row in table.rows}
        same_rank += med_rank[by_level[0.0].label] == med_rank[by_level[0.2].label]
    record_property("detail", f"{source}; SA increase n=0 -> n=1.0 in [{min(increases):.1f}, "
                              f"{max(increases):.1f}]; n=0/n=0.2 same rank in {same_rank}/{runs} runs")
    assert all(0 < d <= 30 for d in increases)
    assert same_rank / runs >= 0.8


def reference_ranks(groups, config):
    """Scott-Knott with the cut chosen by enumerating every E(Delta)."""
    items = sorted(((float(np.median(v)), label, list(v)) for label, v in groups), key=lambda t: t[:2])
    ranks = {}

    def divide(lo, hi, rank):
        if hi - lo > 1:
            part = [items[i][2] for i in range(lo, hi)]
            scores = [e_delta(part, c) for c in range(1, len(part))]
            top = max(scores)
            cut = lo + next(i for i, s in enumerate(scores, 1) if s >= top - 1e-9)
            left = [v for i in range(lo, cut) for v in items[i][2]]
            right = [v for i in range(cut, hi) for v in items[i][2]]
            if differ(left, right, config, rngmod.stream(config.rng_seed, lo, cut, hi)):
                last = divide(lo, cut, rank)
                return divide(cut, hi, last + 1)
        for i in range(lo, hi):
            ranks[items[i][1]] = rank
        return rank

    divide(0, len(items), 1)
    return ranks


def test_criterion_05_statistical_calibration(record_property):
    rng = np.random.default_rng(505)
    rejected = sum(bootstrap_differ(rng.normal(10, 3, 25), rng.normal(10, 3, 25), SkConfig(rng_seed=t))
                   for t in range(200))

    prng = random.Random(55)
    a12_mismatch = 0
    for _ in range(1000):
        m = [prng.randint(0, 6) for _ in range(prng.randint(1, 15))]
        n = [prng.randint(0, 6) for _ in range(prng.randint(1, 15))]
        a12_mismatch += a12(m, n) != pair_a12(m, n)

    cfg = SkConfig(bootstrap_resamples=200)
    sk_mismatch, multi = 0, 0
    for t in range(2000):
        k = prng.randint(1, 6)
        groups = [(f"g{i}", [prng.randint(0, 9) for _ in range(prng.randint(1, 5))]) for i in range(k)]
        got = {g.label: g.rank for g in scott_knott(groups, cfg)}
        sk_mismatch += got != reference_ranks(groups, cfg)
        multi += len(set(got.values())) > 1
    record_property("detail", f"false rejections {rejected}/200; a12 mismatches {a12_mismatch}/1000; "
                              f"split mismatches {sk_mismatch}/2000 ({multi} with splits)")
    assert rejected / 200 <= 0.05
    assert a12_mismatch == 0
    assert sk_mismatch == 0


def test_criterion_06_sa_oracle(record_property):
    rng = random.Random(6)
    actual = [rng.uniform(1, 1000) for _ in range(30)]
    predicted = [a * rng.uniform(0.3, 2.5) for a in actual]
    exact = 100 * sum(abs(a - p) for a, p in zip(actual, predicted)) / sum(
        sum(abs(c - p) for c in actual) / len(actual) for p in predicted)
    mc = sa_error(actual, predicted, actual, SaConfig(baseline_draws=100_000, rng_seed=6))
    perfect = sa_error(actual, actual, actual)
    rel = abs(mc - exact) / exact
    record_property("detail", f"exhaustive {exact:.3f} vs Monte Carlo {mc:.3f} (rel {rel:.2e}); perfect {perfect}")
    assert rel < 0.02
    assert perfect == 0


def test_criterion_07_perturbation_law(record_property):
    kloc = 42.0
    worst = 0.0
    for n in DEFAULT_LEVELS:
        out = perturb_kloc(kloc, n, rngmod.stream(7, int(n * 10)).random(100_000))
        worst = max(worst, abs(out.mean() - kloc) / kloc)
        assert out.min() >= max(kloc * (1 - n), KLOC_FLOOR) - 1e-12
        assert out.max() <= kloc * (1 + n) + 1e-12
    record_property("detail", f"worst relative mean error {worst:.2e}")
    assert worst < 0.01


def test_criterion_08_calibration_recovery(record_property):
    clean = calibrate(cocomo2_dataset(n=40, seed=8))
    truth = CalibrationParams(a=5.0, b=1.2)
    bs = [calibrate(cocomo2_dataset(n=50, params=truth, sigma=0.1, seed=100 + i)).b for i in range(30)]
    b_med = float(np.median(bs))
    record_property("detail", f"noiseless |da|={abs(clean.a - 2.94):.1e} |db|={abs(clean.b - 0.91):.1e}; "
                              f"noisy median b={b_med:.4f}")
    assert abs(clean.a - 2.94) <= 1e-9 and abs(clean.b - 0.91) <= 1e-9
    assert abs(b_med - 1.2) <= 0.05


def test_criterion_09_size_error_summary(record_property):
    s = size_error_summary(load_size_errors(bundled_path("nasa_size_errors.csv")), PRE_CODING)
    record_property("detail", f"{s.within_band} of {s.n} within ±100%, max {s.max_abs_error:g}%")
    assert (s.within_band, s.n, s.max_abs_error) == (13, 14, 236)


def test_criterion_10_growth_concavity(record_property):
    grid = np.linspace(1, 10_000, 200).tolist()
    worst = -math.inf
    count = 0
    env = build_envelope()
    for bound in (LOWER, UPPER):
        for curve in growth_curves(UNIFORM_LEVELS, bound, grid, env):
            y = np.log([e for _, e in curve.points])
            second = y[:-2] - 2 * y[1:-1] + y[2:]
            worst = max(worst, float(second.max()))
            count += 1
    record_property("detail", f"{count} curves, largest second difference {worst:.3e}")
    assert worst < 0
