"""Exception types raised across the package."""


class GtdynError(Exception):
    """Base class for all package errors."""


class NumericDomainError(GtdynError, ValueError):
    """A quantity left its mathematical domain (pole, sign, or imaginary residue)."""


class MissingValueError(GtdynError, KeyError):
    """A test function was evaluated at a point where it is not defined."""


class WindowError(GtdynError, ValueError):
    """A truncation window is too small for the requested computation."""


class ScopeError(GtdynError, ValueError):
    """Input outside the supported size of a brute-force routine."""


class SpaceMismatchError(GtdynError, ValueError):
    """Two kernels cannot be composed because their state spaces differ."""
