"""Exception types raised by noma_lab."""

__all__ = [
    "NomaLabError", "NonPrimeError", "TooSmallError", "UnsupportedPrimeError", "SizeCapError",
    "AlphaOutOfRangeError", "UnsupportedDimensionError", "InsufficientDataError",
    "ConfigInvalidError", "UnknownFigureError",
]


class NomaLabError(ValueError):
    """Base class for all invalid-request errors in this package."""


class NonPrimeError(NomaLabError):
    pass


class TooSmallError(NomaLabError):
    pass


class UnsupportedPrimeError(NomaLabError):
    pass


class SizeCapError(NomaLabError):
    """Raised when a constellation or pair scan would exceed the size cap."""


class AlphaOutOfRangeError(NomaLabError):
    pass


class UnsupportedDimensionError(NomaLabError):
    pass


class InsufficientDataError(NomaLabError):
    pass


class ConfigInvalidError(NomaLabError):
    """Bad simulation or command configuration.

    ``field`` names the offending parameter when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class UnknownFigureError(NomaLabError):
    pass
