"""Exception hierarchy shared by every module."""


class OmegaCensusError(Exception):
    """Base class for all toolkit errors."""


class DomainError(OmegaCensusError, ValueError):
    """An argument lies outside the range where a quantity is defined."""


class BudgetError(OmegaCensusError):
    """A request exceeds the configured resource budget."""


class ValidationError(OmegaCensusError, ValueError):
    """A partition spec or input document is malformed."""


class ConsistencyError(OmegaCensusError):
    """Two independent computations of the same quantity disagree."""


class DegreeBoundError(DomainError):
    """A torus grid is too coarse to invert the generating polynomial exactly."""


class SearchFailure(ConsistencyError):
    """No admissible point was found in a search window that should contain one."""
