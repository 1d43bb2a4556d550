"""Exception types shared across the package.

Input/usage problems derive from ``ValueError`` so callers that only know
the standard library still catch them; runtime failures (numerics,
training) derive from ``RuntimeError``.
"""


class UdpsslError(Exception):
    """Base class for all package errors."""


class FormatError(UdpsslError, ValueError):
    """A file does not follow its declared format (bad magic, ragged rows)."""


class ParseError(UdpsslError, ValueError):
    """A cell or field could not be parsed as the expected type."""


class LengthError(UdpsslError, ValueError):
    """A payload is shorter or longer than its header declares."""


class ConsistencyError(UdpsslError, ValueError):
    """Two inputs that must agree (counts, row order) do not."""


class ArgumentError(UdpsslError, ValueError):
    """An argument is outside its documented domain."""


class BalanceError(UdpsslError, ValueError):
    """A class-balanced split cannot be satisfied."""


class SizeError(UdpsslError, ValueError):
    """An input exceeds a documented size cap."""


class NumericalError(UdpsslError, RuntimeError):
    """A numerical routine failed (e.g. a matrix is not positive definite)."""


class TrainingError(UdpsslError, RuntimeError):
    """Training produced a non-finite quantity or inconsistent state."""
