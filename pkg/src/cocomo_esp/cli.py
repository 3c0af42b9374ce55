"""``cocomo-esp`` command line.

Settings resolve as: command-line flag, then an ``ESP_<NAME>`` environment
variable (e.g. ``ESP_SEED``, ``ESP_REPEATS``), then the built-in default.

Exit codes: 0 success, 1 bad input, 2 internal invariant violation.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import bounds as bnd
from .calibration import calibrate, calibration_study
from .dataset import (
    COCOMO2,
    COCOMO81,
    PRE_ANALYSIS,
    PRE_CODING,
    bundled_path,
    load_dataset,
    load_size_errors,
    size_error_summary,
)
from .errors import EmptyInput, InputError, InvalidGrid, InvariantViolation, ParseError
from .metrics import SaConfig, median
from .model import CalibrationParams, estimate_effort
from .perturbation import DEFAULT_LEVELS, NoiseSpec, run_study
from .report import (
    ReportTable,
    curves_csv,
    envelope_tables,
    perturbation_table,
    render,
    samples_csv,
    to_csv,
)
from .stats import SkConfig, scott_knott


def _env(name: str, default, cast: Callable = str):
    raw = os.environ.get(f"ESP_{name}")
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise InputError(f"bad value for ESP_{name}: {raw!r}") from None


def _levels(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise InputError(f"bad --levels {text!r}; expected comma-separated fractions") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


class Output:
    """Collects everything a command prints so failures emit no partial table."""

    def __init__(self, markdown: bool):
        self.markdown = markdown
        self.parts: list[str] = []
        self.files: list[tuple[Path, str]] = []

    def table(self, table: ReportTable, precision: int = 2) -> None:
        self.parts.append(render(table, precision, self.markdown))

    def text(self, line: str) -> None:
        self.parts.append(line + "\n")

    def file(self, path: str | None, content: str) -> None:
        if path:
            self.files.append((Path(path), content))

    def flush(self) -> None:
        for path, content in self.files:
            path.write_text(content, encoding="utf-8")
        sys.stdout.write("\n".join(self.parts))


def cmd_estimate(args, out: Output) -> None:
    ds = load_dataset(args.dataset, args.format, args.cells)
    params = CalibrationParams(args.a, args.b)
    rows = []
    for p in ds.projects:
        est = estimate_effort(p, params)
        actual = p.actual_effort
        rows.append((p.id, p.kloc, est, "" if actual is None else actual,
                     "" if actual is None else abs(actual - est)))
    cols = ("id", "kloc", "estimate", "actual", "abs_residual")
    out.table(ReportTable(f"{ds.name}: COCOMO-II estimates (a={params.a}, b={params.b})", cols, tuple(rows)))
    out.file(args.out, to_csv(cols, rows))


def cmd_perturb(args, out: Output) -> None:
    ds = load_dataset(args.dataset, args.format, args.cells)
    spec = NoiseSpec(_levels(args.levels), args.repeats, args.seed)
    sa = SaConfig(baseline_draws=args.baseline_draws, rng_seed=args.seed, variant=args.sa_variant)
    sets = run_study(ds, spec, CalibrationParams(args.a, args.b), sa_config=sa, max_workers=args.workers)
    sk = SkConfig(bootstrap_resamples=args.resamples, confidence=args.confidence,
                  a12_threshold=args.a12, rng_seed=args.seed)
    table = perturbation_table(sets, sk, title=f"{ds.name}: SA over {spec.repeats} repeats (lower is better)")
    out.table(table, precision=1)
    out.file(args.out, samples_csv(sets))


def cmd_bounds(args, out: Output) -> None:
    if args.points < 2:
        raise InvalidGrid("--points must be at least 2")
    env = bnd.build_envelope()
    for t in envelope_tables(env):
        out.table(t, precision=4)
    out.text(f"max/min effort ratio = {env.ratio_coefficient:.1f} * KLOC^{env.ratio_exponent:.4f}")
    grid = (bnd.default_grid(args.kloc_min, args.kloc_max, args.points) if args.grid == "log"
            else _linear_grid(args.kloc_min, args.kloc_max, args.points))
    curves = bnd.growth_curves(bound=bnd.LOWER, kloc_grid=grid, envelope=env)
    curves += bnd.growth_curves(bound=bnd.UPPER, kloc_grid=grid, envelope=env)
    out.file(args.out, curves_csv(curves))
    if args.out:
        out.text(f"wrote {len(curves)} growth curves x {len(grid)} points to {args.out}")


def _linear_grid(lo: float, hi: float, points: int) -> list[float]:
    if not 0 < lo < hi:
        raise InvalidGrid(f"need 0 < kloc_min < kloc_max, got {lo}, {hi}")
    step = (hi - lo) / (points - 1)
    return [lo + i * step for i in range(points)]


def read_groups(path: str | Path) -> list[tuple[str, list[float]]]:
    """``label,value`` rows (header optional, ``#`` comments) into ordered groups."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    groups: dict[str, list[float]] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 2:
            raise ParseError("expected label,value", row=lineno)
        label, text = cells
        try:
            value = float(text)
        except ValueError:
            if not groups and lineno == _first_data_line(lines):
                continue  # header row
            raise ParseError(f"not a number: {text!r}", row=lineno, column="value") from None
        groups.setdefault(label, []).append(value)
    if not groups:
        raise EmptyInput(f"{path}: no groups")
    return list(groups.items())


def _first_data_line(lines: Sequence[str]) -> int:
    for i, line in enumerate(lines, start=1):
        if line.strip() and not line.lstrip().startswith("#"):
            return i
    return 0


def cmd_rank(args, out: Output) -> None:
    groups = read_groups(args.groups)
    cfg = SkConfig(bootstrap_resamples=args.resamples, confidence=args.confidence,
                   a12_threshold=args.a12, rng_seed=args.seed)
    ranked = scott_knott(groups, cfg)
    rows = tuple((g.label, g.rank, g.median, g.iqr) for g in ranked)
    cols = ("label", "rank", "median", "iqr")
    out.table(ReportTable("Scott-Knott ranks", cols, rows), precision=3)
    out.file(args.out, to_csv(cols, rows))


def cmd_sizes(args, out: Output) -> None:
    records = load_size_errors(args.errors or bundled_path("nasa_size_errors.csv"))
    s = size_error_summary(records, args.stage, carry_forward=not args.no_carry_forward)
    rows = (("n", s.n), ("within band", s.within_band), ("max |error| %", s.max_abs_error),
            ("min %", s.min), ("median %", s.median), ("max %", s.max))
    out.table(ReportTable(f"Size errors at {s.stage}", ("Statistic", "Value"), rows), precision=1)
    out.text(f"{s.within_band} of {s.n} within ±{s.band:g}%")
    out.file(args.out, to_csv(("statistic", "value"), rows))


def cmd_calibrate(args, out: Output) -> None:
    ds = load_dataset(args.dataset, args.format, args.cells)
    full = calibrate(ds)
    study = calibration_study(ds, args.repeats, args.holdout, args.seed)
    lo, hi = bnd.B_RANGE
    # tolerance so a fit that lands on 0.91 up to rounding counts as inside
    rows = tuple((i + 1, s.a, s.b, lo - 1e-9 <= s.b <= hi + 1e-9) for i, s in enumerate(study.samples))
    cols = ("repeat", "a", "b", "b_in_historical_range")
    out.table(ReportTable(f"{ds.name}: {args.repeats} calibrations on {args.holdout:.0%} of the data", cols, rows),
              precision=4)
    out.text(f"full-data fit: a={full.a:.4f} b={full.b:.4f}")
    out.text(f"median a={median(study.a_values):.4f} median b={median(study.b_values):.4f}; "
             f"{sum(r[3] for r in rows)} of {len(rows)} b values in [{lo}, {hi:.3f}]")
    out.file(args.out, to_csv(cols, rows))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_env("SEED", 0, int), help="master random seed")
    common.add_argument("--out", default=_env("OUT", None), help="write machine-readable CSV here")
    common.add_argument("--markdown", action="store_true", help="render tables as Markdown")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("dataset", help="dataset CSV")
    data.add_argument("--format", choices=(COCOMO2, COCOMO81), default=_env("FORMAT", COCOMO2))
    data.add_argument("--cells", choices=("auto", "ratings", "multipliers"), default=_env("CELLS", "auto"),
                      help="cocomo81 cell encoding")
    data.add_argument("--a", type=float, default=_env("A", 2.94, float))
    data.add_argument("--b", type=float, default=_env("B", 0.91, float))

    ranking = argparse.ArgumentParser(add_help=False)
    ranking.add_argument("--confidence", type=float, default=_env("CONFIDENCE", 0.99, float))
    ranking.add_argument("--a12", type=float, default=_env("A12", 0.6, float))
    ranking.add_argument("--resamples", type=int, default=_env("RESAMPLES", 1000, int))

    parser = _Parser(prog="cocomo-esp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common, data], help="COCOMO-II estimate per project")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("perturb", parents=[common, data, ranking], help="KLOC perturbation study")
    p.add_argument("--levels", default=_env("LEVELS", ",".join(str(n) for n in DEFAULT_LEVELS)))
    p.add_argument("--repeats", type=int, default=_env("REPEATS", 100, int))
    p.add_argument("--baseline-draws", type=int, default=_env("BASELINE_DRAWS", 1000, int))
    p.add_argument("--sa-variant", choices=("literal", "conventional"), default=_env("SA_VARIANT", "literal"))
    p.add_argument("--workers", type=int, default=_env("WORKERS", None, int))
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("bounds", parents=[common], help="min/max effort envelope and growth curves")
    p.add_argument("--kloc-min", type=float, default=_env("KLOC_MIN", 1.0, float))
    p.add_argument("--kloc-max", type=float, default=_env("KLOC_MAX", 10_000.0, float))
    p.add_argument("--points", type=int, default=_env("POINTS", 50, int))
    p.add_argument("--grid", choices=("log", "linear"), default=_env("GRID", "log"))
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("rank", parents=[common, ranking], help="Scott-Knott ranking of label,value rows")
    p.add_argument("groups", help="CSV of label,value rows")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("sizes", parents=[common], help="size-error survey summary")
    p.add_argument("errors", nargs="?", help="size-error CSV (default: bundled NASA table)")
    p.add_argument("--stage", choices=(PRE_ANALYSIS, PRE_CODING), default=_env("STAGE", PRE_CODING))
    p.add_argument("--no-carry-forward", action="store_true",
                   help="skip missing pre-coding values instead of reusing the pre-analysis estimate")
    p.set_defaults(func=cmd_sizes)

    p = sub.add_parser("calibrate", parents=[common, data], help="local (a, b) calibration study")
    p.add_argument("--repeats", type=int, default=_env("REPEATS", 30, int))
    p.add_argument("--holdout", type=float, default=_env("HOLDOUT", 0.9, float))
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        out = Output(args.markdown)
        args.func(args, out)
        out.flush()
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
