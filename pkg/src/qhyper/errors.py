"""Exception types shared across the package.

Every error raised by the library derives from :class:`QhyperError`, so
callers (including the command line tool) can map failures to a small
set of outcomes: malformed input text, invalid or mismatched data, and
enumeration sizes that exceed a hard cap.
"""

__all__ = [
    "QhyperError",
    "DimensionMismatchError",
    "ValidationError",
    "KetSyntaxError",
    "SizeCapError",
]


class QhyperError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(QhyperError):
    """Operands have incompatible orders, mode lengths, or shapes."""


class ValidationError(QhyperError):
    """Input violates a documented precondition (norm, finiteness, range)."""


class KetSyntaxError(QhyperError):
    """Ket expression text could not be parsed."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SizeCapError(QhyperError):
    """Requested computation exceeds a hard size cap."""
