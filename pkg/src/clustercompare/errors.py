"""Exception types raised by the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class UndefinedAdjustmentError(ArithmeticError):
    """Chance correction or normalization would divide by zero."""


class EnumerationLimitError(DomainError):
    """An exhaustive enumeration was requested beyond the supported ceiling."""


class ElementMismatchError(DomainError):
    """Two clusterings do not cover the same element set."""
