"""Exception types shared across the package."""

__all__ = [
    "PolyhardyError",
    "DegreeOverflow",
    "GridMismatch",
    "NumericError",
    "DomainError",
    "Unsupported",
    "PrereqFailed",
    "StructureViolation",
]


class PolyhardyError(Exception):
    """Base class for all errors raised by this package."""


class DegreeOverflow(PolyhardyError):
    """A multi-index or polynomial degree does not fit the truncation grid."""


class GridMismatch(PolyhardyError):
    """Operands live on incompatible truncation grids or have wrong shapes."""


class NumericError(PolyhardyError):
    """Non-finite data or a numerically meaningless request."""


class DomainError(PolyhardyError):
    """Input violates a mathematical domain constraint (e.g. modulus >= 1)."""


class Unsupported(PolyhardyError):
    """The requested structure is outside what the toolkit realizes."""


class PrereqFailed(PolyhardyError):
    """A checked precondition of a theorem-level routine does not hold."""


class StructureViolation(PolyhardyError):
    """Numerical data contradicts the structure a theorem guarantees."""
