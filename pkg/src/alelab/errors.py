"""Exception types raised across the package."""


class AleError(Exception):
    """Base class for all package errors."""


class ConfigError(AleError, ValueError):
    """Invalid parameter or configuration value."""


class DomainError(AleError, ValueError):
    """A point lies outside the domain of the requested map."""


class PoleError(DomainError):
    """Evaluation exactly at a singular boundary point."""


class OutOfRegimeError(AleError, ValueError):
    """Input violates a quantitative hypothesis of an estimate."""


class SwallowedError(AleError):
    """A point was absorbed by a Loewner hull before the final time."""


class StatisticsError(AleError, ValueError):
    """Not enough data for the requested statistic."""


class NumericalAbort(AleError):
    """A run could not be completed within numerical tolerances."""
