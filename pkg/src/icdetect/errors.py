"""Exception types raised across the package."""


class IcDetectError(ValueError):
    """Base class for all package errors."""


class InvalidOrderError(IcDetectError):
    pass


class InvalidInputError(IcDetectError):
    pass


class InvalidNoiseError(IcDetectError):
    pass


class UnsupportedDomainError(IcDetectError):
    pass


class UnsupportedKindError(IcDetectError):
    pass


class ConfigError(IcDetectError):
    pass
