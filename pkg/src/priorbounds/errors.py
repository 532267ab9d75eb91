"""Exception types raised across the package."""


class PriorBoundsError(Exception):
    """Base class for all package errors."""


class EnumerationTooLarge(PriorBoundsError, ValueError):
    """The dataset or learner space exceeds the enumeration cap."""


class NonFiniteSupport(PriorBoundsError, ValueError):
    """Exact enumeration was requested for a family without finite support."""


class DomainError(PriorBoundsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedMetric(PriorBoundsError, ValueError):
    """No verifier exists for the requested pseudometric."""


class InvalidPacking(PriorBoundsError, ValueError):
    """A packing or Hamming separation failed verification."""


class DegenerateIndexSet(PriorBoundsError, ValueError):
    """An index set is too small for the requested method."""


class EmptyActionSet(PriorBoundsError, ValueError):
    """A loss matrix has no action columns."""
