"""Exception hierarchy for entropy-lab."""


class EntropyLabError(Exception):
    """Base exception for entropy-lab errors."""

    pass


class DomainError(EntropyLabError, ValueError):
    """An argument violates a documented precondition."""

    pass


class NormalizationError(DomainError):
    """A functional that needs unit Lp mass received a non-normalized input."""

    pass


class DegenerateProfileError(DomainError):
    """Profile or grid on which the requested functional is undefined."""

    pass


class NumericalError(EntropyLabError):
    """Quadrature or closed-form evaluation could not be trusted."""

    pass


class ConfigError(EntropyLabError):
    """Unreadable or malformed run configuration."""

    pass
