"""Project datasets on disk and the size-error survey.

CSV contract
------------
UTF-8, ``#`` starts a comment line, header of lowercase column names.

``cocomo2`` files carry the 22 COCOMO-II attributes plus ``kloc`` and,
optionally, ``effort`` and ``id``.  Rating cells are ``1``..``6`` or
``vl, l, n, h, vh, xh`` (any case).

``cocomo81`` files carry rely, data, cplx, time, stor, virt, turn, acap, aexp,
pcap, vexp, lexp, modp, tool, sced, kloc and effort.  Their cells are either
ratings as above or the COCOMO-81 multiplier values themselves (the PROMISE
convention, e.g. ``rely=0.88``); see ``cells=`` on :func:`load_dataset`.
``loc`` and ``actual`` are accepted as aliases for ``kloc`` and ``effort``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .errors import (
    EmptyDataset,
    EmptyInput,
    InputError,
    InvalidKloc,
    InvalidRating,
    MissingColumn,
    ParseError,
    UnknownRatingSymbol,
)
from .metrics import median
from .model import ATTRIBUTES, EFFORT_MULTIPLIERS, SCALE_FACTORS, Project, Rating

COCOMO2 = "cocomo2"
COCOMO81 = "cocomo81"

_ALIASES = {"loc": "kloc", "actual": "effort", "months": "effort", "project": "id"}

_ = None
# COCOMO-81 intermediate effort multipliers, vl..xh
COC81_MULTIPLIERS: dict[str, tuple[float | None, ...]] = {
    "rely": (0.75, 0.88, 1.00, 1.15, 1.40, _),
    "data": (_, 0.94, 1.00, 1.08, 1.16, _),
    "cplx": (0.70, 0.85, 1.00, 1.15, 1.30, 1.65),
    "time": (_, _, 1.00, 1.11, 1.30, 1.66),
    "stor": (_, _, 1.00, 1.06, 1.21, 1.56),
    "virt": (_, 0.87, 1.00, 1.15, 1.30, _),
    "turn": (_, 0.87, 1.00, 1.07, 1.15, _),
    "acap": (1.46, 1.19, 1.00, 0.86, 0.71, _),
    "aexp": (1.29, 1.13, 1.00, 0.91, 0.82, _),
    "pcap": (1.42, 1.17, 1.00, 0.86, 0.70, _),
    "vexp": (1.21, 1.10, 1.00, 0.90, _, _),
    "lexp": (1.14, 1.07, 1.00, 0.95, _, _),
    "modp": (1.24, 1.10, 1.00, 0.91, 0.82, _),
    "tool": (1.24, 1.10, 1.00, 0.91, 0.83, _),
    "sced": (1.23, 1.08, 1.00, 1.04, 1.10, _),
}
COC81_ATTRIBUTES: tuple[str, ...] = tuple(COC81_MULTIPLIERS)

# COCOMO-81 name -> COCOMO-II name, for attributes that carry over one-to-one
COC81_RENAMES = {
    "rely": "rely", "data": "data", "cplx": "cplx", "time": "time", "stor": "stor",
    "acap": "acap", "aexp": "aexp", "pcap": "pcap", "sced": "sced",
    "virt": "pvol", "vexp": "plex", "lexp": "ltex",
}


@dataclass(frozen=True)
class Dataset:
    projects: tuple[Project, ...]
    name: str = "dataset"
    source_path: str | None = field(default=None, compare=False)

    def __post_init__(self):
        projects = tuple(self.projects)
        if not projects:
            raise EmptyDataset(f"dataset {self.name!r} has no projects")
        ids = [p.id for p in projects]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            raise InputError(f"duplicate project ids: {', '.join(dupes)}")
        object.__setattr__(self, "projects", projects)

    def __len__(self) -> int:
        return len(self.projects)

    def __iter__(self) -> Iterator[Project]:
        return iter(self.projects)

    @property
    def actuals(self) -> list[float | None]:
        return [p.actual_effort for p in self.projects]


def bundled_path(filename: str) -> Path:
    """Path of a data file shipped inside the package."""
    return Path(str(resources.files("cocomo_esp") / "data" / filename))


def _read_rows(path: Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    numbered = [(i, line) for i, line in enumerate(text.splitlines(), start=1)
                if line.strip() and not line.lstrip().startswith("#")]
    if not numbered:
        raise EmptyDataset(f"{path}: no header row")
    parsed = list(csv.reader(line for _, line in numbered))
    header = [_ALIASES.get(h.strip().lower(), h.strip().lower()) for h in parsed[0]]
    rows = [(lineno, [c.strip() for c in cells]) for (lineno, _), cells in zip(numbered[1:], parsed[1:])]
    for lineno, cells in rows:
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(cells)}", row=lineno)
    return header, rows


def _number(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", row=row, column=column) from None
    if not math.isfinite(value):
        raise ParseError(f"not a finite number: {text!r}", row=row, column=column)
    return value


def _rating(text: str, row: int | None = None, column: str | None = None) -> Rating:
    try:
        return Rating.parse(text)
    except InvalidRating:
        raise UnknownRatingSymbol(f"unknown rating {text!r}", row=row, column=column) from None


def _multiplier_rating(attribute: str, text: str, row: int | None, tol: float = 0.006) -> Rating:
    value = _number(text, row, attribute)
    for level, cell in zip(Rating, COC81_MULTIPLIERS[attribute]):
        if cell is not None and abs(cell - value) <= tol:
            return level
    raise UnknownRatingSymbol(f"{value} is not a COCOMO-81 multiplier for {attribute}", row=row, column=attribute)


def _looks_like_multipliers(header: list[str], rows: list[tuple[int, list[str]]]) -> bool:
    cols = [i for i, h in enumerate(header) if h in COC81_MULTIPLIERS]
    for _, cells in rows:
        for i in cols:
            text = cells[i]
            try:
                value = float(text)
            except ValueError:
                continue
            if not value.is_integer():
                return True
    return False


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def convert_cocomo81(record: Mapping[str, Any], id: str | None = None) -> Project:
    """Map a COCOMO-81 rating record onto a COCOMO-II project.

    * rely, data, cplx, time, stor, acap, aexp, pcap, sced copy through;
    * virt -> pvol, vexp -> plex, lexp -> ltex;
    * modp and tool merge into tool as their mean rating, rounded half up;
    * turn is dropped;
    * prec, flex, resl, team, pmat, docu, ruse, pcon, site are set to nominal.

    ``record`` values are ratings (ints or symbols); ``kloc`` is required and
    ``effort`` optional.
    """
    rec = {_ALIASES.get(str(k).lower(), str(k).lower()): v for k, v in record.items()}
    needed = [a for a in COC81_ATTRIBUTES if a != "turn"] + ["kloc"]
    missing = [a for a in needed if a not in rec]
    if missing:
        raise MissingColumn(f"COCOMO-81 record lacks {', '.join(missing)}")

    ratings = {name: Rating.NOMINAL for name in ATTRIBUTES}
    for old, new in COC81_RENAMES.items():
        ratings[new] = _rating(rec[old], column=old)
    modp = _rating(rec["modp"], column="modp")
    tool = _rating(rec["tool"], column="tool")
    ratings["tool"] = Rating(_round_half_up((modp + tool) / 2))

    effort = rec.get("effort")
    if effort in ("", None):
        effort = None
    return Project(
        id=str(id if id is not None else rec.get("id", "p")),
        kloc=float(rec["kloc"]),
        sf_ratings={k: ratings[k] for k in SCALE_FACTORS},
        em_ratings={k: ratings[k] for k in EFFORT_MULTIPLIERS},
        actual_effort=None if effort is None else float(effort),
    )


def _project_from_row(header, cells, lineno, fmt, multipliers, name) -> Project:
    row = dict(zip(header, cells))
    ident = row.get("id") or f"{name}-{lineno}"
    kloc = _number(row["kloc"], lineno, "kloc")
    if kloc <= 0:
        raise InvalidKloc(f"kloc must be > 0, got {row['kloc']}")
    effort_text = row.get("effort", "")
    effort = _number(effort_text, lineno, "effort") if effort_text else None
    if effort is not None and effort <= 0:
        raise ParseError(f"effort must be > 0, got {effort_text}", row=lineno, column="effort")

    if fmt == COCOMO2:
        ratings = {a: _rating(row[a], lineno, a) for a in ATTRIBUTES}
        return Project(
            id=ident,
            kloc=kloc,
            sf_ratings={k: ratings[k] for k in SCALE_FACTORS},
            em_ratings={k: ratings[k] for k in EFFORT_MULTIPLIERS},
            actual_effort=effort,
        )

    record: dict[str, Any] = {"kloc": kloc, "effort": effort}
    for attribute in COC81_ATTRIBUTES:
        if attribute not in row:
            continue
        text = row[attribute]
        record[attribute] = (_multiplier_rating(attribute, text, lineno) if multipliers
                             else _rating(text, lineno, attribute))
    try:
        return convert_cocomo81(record, id=ident)
    except (MissingColumn, UnknownRatingSymbol) as exc:
        raise type(exc)(str(exc), row=lineno) from None


def load_dataset(path: str | Path, format: str = COCOMO2, cells: str = "auto",
                 name: str | None = None) -> Dataset:
    """Read and validate a dataset file.

    ``cells`` only matters for ``cocomo81``: ``"ratings"``, ``"multipliers"``
    or ``"auto"`` (multipliers if any rating cell holds a non-integer number).
    """
    if format not in (COCOMO2, COCOMO81):
        raise InputError(f"unknown dataset format {format!r}")
    if cells not in ("auto", "ratings", "multipliers"):
        raise InputError(f"unknown cell encoding {cells!r}")
    path = Path(path)
    name = name or path.stem
    header, rows = _read_rows(path)

    required = list(ATTRIBUTES if format == COCOMO2 else [a for a in COC81_ATTRIBUTES if a != "turn"]) + ["kloc"]
    missing = [c for c in required if c not in header]
    if missing:
        raise MissingColumn(f"{path}: missing columns {', '.join(missing)}")
    if not rows:
        raise EmptyDataset(f"{path}: no data rows")

    multipliers = format == COCOMO81 and (
        cells == "multipliers" or (cells == "auto" and _looks_like_multipliers(header, rows)))
    projects = []
    for lineno, row_cells in rows:
        try:
            projects.append(_project_from_row(header, row_cells, lineno, format, multipliers, name))
        except ParseError:
            raise
        except InputError as exc:
            raise type(exc)(f"row {lineno}: {exc}") from None
    return Dataset(tuple(projects), name=name, source_path=str(path))


def dataset_to_csv(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", *ATTRIBUTES, "kloc", "effort"])
    for p in dataset.projects:
        ratings = p.ratings
        writer.writerow([
            p.id,
            *(int(ratings[a]) for a in ATTRIBUTES),
            repr(p.kloc),
            "" if p.actual_effort is None else repr(p.actual_effort),
        ])
    return buf.getvalue()


def write_dataset(dataset: Dataset, path: str | Path) -> Path:
    """Write ``dataset`` in the cocomo2 CSV format."""
    path = Path(path)
    path.write_text(dataset_to_csv(dataset), encoding="utf-8")
    return path


# -- size-error survey ---------------------------------------------------------

PRE_ANALYSIS = "pre_analysis"
PRE_CODING = "pre_coding"


@dataclass(frozen=True)
class SizeErrorRecord:
    """Signed size error, percent of final code size (positive = under-estimate)."""

    project_id: str
    pre_analysis_error: float | None = None
    pre_coding_error: float | None = None

    def __post_init__(self):
        if self.pre_analysis_error is None and self.pre_coding_error is None:
            raise InputError(f"record {self.project_id}: no error values")

    def error_at(self, stage: str, carry_forward: bool = True) -> float | None:
        if stage == PRE_ANALYSIS:
            return self.pre_analysis_error
        if stage == PRE_CODING:
            if self.pre_coding_error is None and carry_forward:
                return self.pre_analysis_error
            return self.pre_coding_error
        raise InputError(f"unknown stage {stage!r}")


@dataclass(frozen=True)
class SizeErrorSummary:
    stage: str
    n: int
    within_band: int
    max_abs_error: float
    min: float
    median: float
    max: float
    band: float = 100.0

    def __post_init__(self):
        if not 0 <= self.within_band <= self.n:
            raise InputError("within_band must lie in [0, n]")


def _percent(text: str, row: int, column: str) -> float | None:
    text = text.strip().rstrip("%").strip()
    return None if text == "" else _number(text, row, column)


def load_size_errors(path: str | Path) -> list[SizeErrorRecord]:
    """Read ``project,pre_analysis,pre_coding`` rows; blank cells are absent."""
    header, rows = _read_rows(Path(path))
    missing = [c for c in ("id", PRE_ANALYSIS, PRE_CODING) if c not in header]
    if missing:
        raise MissingColumn(f"{path}: missing columns {', '.join(missing)}")
    records = []
    for lineno, cells in rows:
        row = dict(zip(header, cells))
        pa = _percent(row[PRE_ANALYSIS], lineno, PRE_ANALYSIS)
        pc = _percent(row[PRE_CODING], lineno, PRE_CODING)
        if pa is None and pc is None:
            raise ParseError("no error values", row=lineno)
        records.append(SizeErrorRecord(row["id"], pa, pc))
    if not records:
        raise EmptyInput(f"{path}: no records")
    return records


def size_error_summary(records: Sequence[SizeErrorRecord], stage: str = PRE_CODING,
                       band: float = 100.0, carry_forward: bool = True) -> SizeErrorSummary:
    """Counts and spread of size errors at one life-cycle stage.

    With ``carry_forward`` a project that made no new estimate before coding
    keeps its pre-analysis estimate for the pre-coding stage.  Values that are
    still absent are skipped.
    """
    if not records:
        raise EmptyInput("no size-error records")
    values = [v for v in (r.error_at(stage, carry_forward) for r in records) if v is not None]
    if not values:
        raise EmptyInput(f"no values at stage {stage}")
    return SizeErrorSummary(
        stage=stage,
        n=len(values),
        within_band=sum(1 for v in values if abs(v) <= band),
        max_abs_error=max(abs(v) for v in values),
        min=min(values),
        median=median(values),
        max=max(values),
        band=band,
    )
