"""Exception types raised by infosum."""


class InfosumError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(InfosumError, ValueError):
    pass


class InvalidDensityError(InfosumError, ValueError):
    pass


class DomainError(InfosumError, ValueError):
    pass


class ResolutionError(InfosumError, ValueError):
    pass


class ScoreUndefinedError(InfosumError, ValueError):
    """The density is not resolved well enough (or not smooth) to define a score."""


class PreconditionError(InfosumError, ValueError):
    pass


class ShapeError(InfosumError, ValueError):
    pass


class ConsistencyError(InfosumError, RuntimeError):
    """Two routes to the same quantity disagreed beyond round-off."""
