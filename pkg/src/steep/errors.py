"""Exception hierarchy."""


class SteepError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(SteepError, ValueError):
    """An input violates a documented precondition."""


class UnsupportedConfigurationError(InvalidArgumentError):
    """The antenna configuration is outside what the scheme supports."""


class SingularChannelError(SteepError, ValueError):
    """A channel matrix lacks the rank the computation requires."""


class RatioUndefinedError(SingularChannelError):
    """The channel-strength ratio does not exist for this pair of channels."""


class BoundNotApplicableError(SteepError, ValueError):
    """A bound was requested outside the regime where it holds."""


class ConsistencyError(SteepError, ArithmeticError):
    """Two independent evaluation paths disagree beyond tolerance."""


class ConfigError(SteepError, ValueError):
    """A CLI configuration document is malformed."""
