"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SeriesGroupError(Exception):
    """Base class for all errors raised by seriesgroup."""


class ZeroDivisorError(SeriesGroupError, ZeroDivisionError):
    pass


class UnassignedSymbolError(SeriesGroupError, ValueError):
    pass


class BlowupError(SeriesGroupError):
    """A polynomial exceeded the configured term-count guard."""


class OrderMismatchError(SeriesGroupError, ValueError):
    pass


class IndeterminateError(SeriesGroupError, ValueError):
    pass


class NonPolynomialRatioWarning(UserWarning):
    """Two fields are proportional, but only over the fraction field."""


class TrivialElementError(SeriesGroupError, ValueError):
    pass


class NameCollisionError(SeriesGroupError, ValueError):
    pass


class UnknownGeneratorError(SeriesGroupError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class WordSyntaxError(SeriesGroupError, ValueError):
    pass


class ConsistencyError(SeriesGroupError, AssertionError):
    """Two independent computations of the same quantity disagree."""


class PreconditionError(SeriesGroupError, ValueError):
    """A tuple fails a hypothesis; ``index`` is the 1-based failing position."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index
