"""Tables and CSV output for the command-line tools."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

from .bounds import BoundsEnvelope, GrowthCurve
from .metrics import iqr, median
from .perturbation import SaSampleSet
from .stats import SkConfig, scott_knott

PERTURB_COLUMNS = ("Name", "Med Rank", "Med", "IQR Rank", "IQR")


@dataclass(frozen=True)
class ReportTable:
    title: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


def perturbation_table(sets: Sequence[SaSampleSet], config: SkConfig = SkConfig(),
                       title: str = "SA by treatment") -> ReportTable:
    """Median/IQR of SA per treatment with Scott-Knott ranks for both.

    The IQR rank comes from ranking each treatment's absolute deviations from
    its own median, i.e. a ranking of dispersion.
    """
    med_ranks = {g.label: g.rank for g in scott_knott([(s.label, s.samples) for s in sets], config)}
    spread = []
    for s in sets:
        m = median(s.samples)
        spread.append((s.label, [abs(v - m) for v in s.samples]))
    iqr_ranks = {g.label: g.rank for g in scott_knott(spread, config)}
    ordered = sorted(sets, key=lambda s: (med_ranks[s.label], s.treatment.noise_level))
    rows = tuple(
        (s.label, med_ranks[s.label], median(s.samples), iqr_ranks[s.label], iqr(s.samples))
        for s in ordered
    )
    return ReportTable(title, PERTURB_COLUMNS, rows)


def _cell(value, precision: int) -> str:
    if isinstance(value, float):
        return f"{value:.{precision}f}"
    return str(value)


def render(table: ReportTable, precision: int = 2, markdown: bool = False) -> str:
    cells = [[_cell(v, precision) for v in row] for row in table.rows]
    if markdown:
        lines = [f"**{table.title}**", "",
                 "| " + " | ".join(table.columns) + " |",
                 "|" + "|".join("---" for _ in table.columns) + "|"]
        lines += ["| " + " | ".join(row) + " |" for row in cells]
        return "\n".join(lines) + "\n"
    widths = [max(len(str(c)), *(len(r[i]) for r in cells)) if cells else len(str(c))
              for i, c in enumerate(table.columns)]

    def line(values):
        return "  ".join(v.rjust(w) if i else v.ljust(w) for i, (v, w) in enumerate(zip(values, widths))).rstrip()

    out = [table.title, line(table.columns), line(["-" * w for w in widths])]
    out += [line(row) for row in cells]
    return "\n".join(out) + "\n"


def to_csv(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def samples_csv(sets: Sequence[SaSampleSet]) -> str:
    rows = [(s.label, s.treatment.noise_level, i, v) for s in sets for i, v in enumerate(s.samples)]
    return to_csv(("treatment", "noise_level", "repeat", "sa"), rows)


def envelope_tables(env: BoundsEnvelope) -> list[ReportTable]:
    levels = ReportTable(
        "Exponent range Y = b + 0.01*sum(SF), b in [%.3f, %.3f]" % env.b_range,
        ("Level", "0.01*sum(SF)", "Y min", "Y max"),
        tuple((lb.level.name.lower(), lb.y_min - env.b_range[0], lb.y_min, lb.y_max) for lb in env.levels),
    )
    constants = ReportTable(
        "Effort envelope em_min*KLOC^y_min <= effort/a <= em_max*KLOC^y_max",
        ("Quantity", "Value"),
        (
            ("em_min", env.em_min),
            ("em_max", env.em_max),
            ("y_min", env.y_min),
            ("y_max", env.y_max),
            ("ratio coefficient em_max/em_min", env.ratio_coefficient),
            ("ratio exponent y_max-y_min", env.ratio_exponent),
        ),
    )
    return [levels, constants]


def curves_csv(curves: Sequence[GrowthCurve]) -> str:
    rows = [(c.label, c.level.name.lower(), c.bound, c.exponent, k, e) for c in curves for k, e in c.points]
    return to_csv(("curve", "level", "bound", "exponent", "kloc", "effort"), rows)
