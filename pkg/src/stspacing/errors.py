"""Exception hierarchy shared by all modules."""


class StSpacingError(Exception):
    """Base class for every error raised by this package."""


class EmptyRangeError(StSpacingError, ValueError):
    pass


class InvalidSpecError(StSpacingError, ValueError):
    pass


class BadReductionError(StSpacingError, ValueError):
    """The curve has bad reduction at the requested prime."""


class InternalConsistencyError(StSpacingError, AssertionError):
    """A mathematical guarantee was violated; always a bug, never valid data."""


class BoundViolationError(StSpacingError, ValueError):
    """A coefficient exceeds the Hasse/Deligne bound."""


class IndexRangeError(StSpacingError, IndexError):
    pass


class DomainError(StSpacingError, ValueError):
    pass


class EmptySeriesError(StSpacingError, ValueError):
    pass


class InsufficientSampleError(StSpacingError, ValueError):
    pass


class UnderSampledError(StSpacingError, ValueError):
    pass


class WidthExceededError(StSpacingError, OverflowError):
    """Residue arithmetic could not represent a coefficient; more moduli are needed."""


class ConfigError(StSpacingError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class CrossCheckError(StSpacingError):
    def __init__(self, prime, eta_value, curve_value):
        super().__init__(
            f"coefficient mismatch at p={prime}: eta product gives {eta_value}, "
            f"point count gives {curve_value}"
        )
        self.prime = prime
        self.eta_value = eta_value
        self.curve_value = curve_value


class CacheFormatError(StSpacingError, ValueError):
    pass
