"""Exception hierarchy.

``ModelError`` covers everything a caller can fix by changing inputs; the CLI
maps it to exit code 1.
"""

from __future__ import annotations


class ModelError(Exception):
    pass


class ZeroEnergyPrice(ModelError):
    pass


class ZeroDenominator(ModelError):
    pass


class ZeroCostHash(ModelError):
    pass


class InvalidRange(ModelError):
    pass


class NonPositivePriceInRange(InvalidRange):
    pass


class SchemaError(ModelError):
    pass


class DuplicateName(ModelError):
    pass


class ParseError(ModelError):
    def __init__(self, row: int, column: str, message: str) -> None:
        self.row = row
        self.column = column
        self.message = message
        super().__init__(f"row {row}, column {column!r}: {message}")


class NonMonotonicDates(ModelError):
    pass


class EmptySeries(ModelError):
    pass


class EmptyWindow(ModelError):
    pass


class UnknownName(ModelError):
    pass


class IncomparableTraces(ModelError):
    pass


class NonConvergence(ModelError):
    def __init__(self, message: str, trace) -> None:
        super().__init__(message)
        self.trace = trace
