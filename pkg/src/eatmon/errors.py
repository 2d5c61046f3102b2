"""Exception types raised by the eatmon library.

Every failure mode that callers are expected to handle has a named class
here, so the CLI can map library errors to exit codes without string
matching. ``EatmonError`` is the common base; ``TraceFormatError`` covers
everything a malformed input file can produce.
"""

from __future__ import annotations


class EatmonError(Exception):
    """Base class for all library errors."""


class TraceFormatError(EatmonError):
    """Base class for trace parsing and validation failures."""

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        super().__init__(message)
        self.row = row
        self.col = col


class MalformedHeader(TraceFormatError):
    pass


class NonMonotoneTimestamps(TraceFormatError):
    pass


class NonFiniteValue(TraceFormatError):
    pass


class WrongColumnCount(TraceFormatError):
    pass


class InvalidTrace(TraceFormatError):
    """A parsed trace violates a structural invariant (e.g. negative
    amplitude, sample rate inconsistent with timestamps)."""

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class InvalidScenario(EatmonError):
    pass


class WindowTooSmall(EatmonError):
    pass


class WindowTooLarge(EatmonError):
    pass


class InvalidBand(EatmonError):
    pass


class SeriesTooShort(EatmonError):
    pass


class SegmentTooShort(EatmonError):
    pass


class DegenerateData(EatmonError):
    pass


class InsufficientData(EatmonError):
    pass


class SingleClass(EatmonError):
    pass


class IntervalTooShort(EatmonError):
    pass


class ZeroGroundTruth(EatmonError):
    pass


class InvalidConfig(EatmonError):
    pass


class ModelFormatError(EatmonError):
    pass
