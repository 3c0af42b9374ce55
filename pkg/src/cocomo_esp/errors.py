"""Exception types shared across the package.

Everything a caller can trigger with bad input derives from ``InputError``;
the CLI maps those to exit code 1.  ``InvariantViolation`` signals a bug
(exit code 2).
"""
from __future__ import annotations


class EspError(Exception):
    """Base class for all package errors."""


class InputError(EspError, ValueError):
    """Bad input supplied by the caller."""


class InvariantViolation(EspError, AssertionError):
    """An internal consistency check failed."""


class UndefinedTuningCell(InputError):
    def __init__(self, attribute: str, rating: int):
        self.attribute = attribute
        self.rating = rating
        super().__init__(f"tuning table has no coefficient for {attribute} at rating {rating}")


class InvalidKloc(InputError):
    pass


class InvalidRating(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class UnknownRatingSymbol(ParseError):
    pass


class MissingColumn(ParseError):
    pass


class EmptyDataset(InputError):
    pass


class EmptyInput(InputError):
    pass


class LengthMismatch(InputError):
    pass


class ZeroDenominator(InputError):
    pass


class MissingActualEffort(InputError):
    pass


class Underdetermined(InputError):
    def __init__(self, message: str, resample: int | None = None):
        self.resample = resample
        if resample is not None:
            message = f"resample {resample}: {message}"
        super().__init__(message)


class OutOfRange(InputError):
    pass


class InvalidGrid(InputError):
    pass
