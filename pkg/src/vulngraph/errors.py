"""Exception types shared across the package."""


class VulngraphError(Exception):
    """Base class for all errors raised by this package."""


class ConstructionError(VulngraphError):
    """Graph generation failed (infeasible parameters or exhausted retry budget)."""


class DomainError(VulngraphError):
    """An operation was called outside its mathematical domain."""


class ComparisonError(VulngraphError):
    """Distributions cannot be compared by the requested method."""
