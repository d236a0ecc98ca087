"""Exception types shared across the package."""


class TvSnrError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(TvSnrError, ValueError):
    """A schedule, mixture or solver was configured with invalid parameters."""


class ScheduleDomainError(TvSnrError, ValueError):
    """A schedule was evaluated at a time where its SNR is undefined or unbounded."""


class InvalidInputError(TvSnrError, ValueError):
    """An operation received inputs violating its preconditions."""


class QuadratureError(TvSnrError, ArithmeticError):
    """Adaptive quadrature could not reach the requested tolerance."""


class DegenerateDensityError(TvSnrError, ValueError):
    """The marginal density collapses to point masses (zero variance)."""
