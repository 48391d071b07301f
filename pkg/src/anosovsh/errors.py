"""Exception hierarchy shared by all modules."""


class AnosovSHError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionError(AnosovSHError, ValueError):
    pass


class SingularityError(AnosovSHError, ValueError):
    pass


class ValidationError(AnosovSHError, ValueError):
    pass


class InvarianceError(AnosovSHError, ValueError):
    pass


class IsotropyError(AnosovSHError, ValueError):
    pass


class DegeneracyError(AnosovSHError, ValueError):
    """Raised when det(I - P) is too close to zero to read off a sign."""


class RegularityError(AnosovSHError, ValueError):
    """A crossing of a symplectic path has a singular crossing form."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class HyperbolicityError(AnosovSHError, ValueError):
    pass


class ResourceError(AnosovSHError, RuntimeError):
    """Enumeration would exceed the configured point cap."""


class ConfigError(AnosovSHError, ValueError):
    """Malformed run configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
