"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ZetaFourierError(Exception):
    """Base class for all errors raised by ``zetafourier``."""


class NumericError(ZetaFourierError):
    """Base class for failures of a numerical procedure (CLI exit code 2)."""


class PoleError(NumericError, ValueError):
    """Evaluation requested at (or too close to) a pole."""


class DomainError(NumericError, ValueError):
    """Argument outside the domain of the map."""


class ToleranceError(NumericError):
    """A refinement check disagreed beyond the requested tolerance."""


class DegenerateParamError(NumericError, ValueError):
    """Whittaker parameters for which the M-combination cannot be formed."""


class RouteDisagreement(NumericError):
    """Two independent quadrature routes disagree.

    Both values are kept on the exception so the caller can inspect them.
    """

    def __init__(self, message: str, first: complex, second: complex):
        super().__init__(message)
        self.first = first
        self.second = second


class ConventionUnvalidated(NumericError):
    """A residue formula was used before calibration selected its convention."""


class CalibrationRequired(ConventionUnvalidated):
    pass


class TailTooLarge(NumericError):
    """The truncated zero sum carries a tail estimate above tolerance."""


class SlowConvergence(NumericError):
    """A series did not reach tolerance within its term budget."""


class IndexRangeError(ZetaFourierError, IndexError):
    """A coefficient table does not cover the requested index range."""


class ZeroTableError(ZetaFourierError):
    """Base class for zero-file ingestion failures (CLI exit code 3)."""


class ParseError(ZeroTableError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class OrderError(ZeroTableError):
    pass


class SanityError(ZeroTableError):
    pass
