"""Exception types shared across the package."""


class KposimError(Exception):
    """Base class for package-specific errors."""


class ConfigError(KposimError, ValueError):
    """Invalid, malformed or unknown run-configuration content.

    ``field`` holds a dotted path into the config (e.g. ``graph.density``)
    when the offending entry is known.
    """

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class SizeLimitError(KposimError, ValueError):
    """Exhaustive enumeration requested for an instance that is too large."""


class BelowThresholdError(KposimError, ValueError):
    """A finite-amplitude steady state was requested below the oscillation threshold."""


class AmbiguousSignError(KposimError, ValueError):
    """Spin readout requested from a vector with components too close to zero."""


class UndefinedSpinError(KposimError, ValueError):
    """Spin readout requested from an oscillator below the amplitude floor."""


class BlowupError(KposimError, RuntimeError):
    """Trajectory amplitude exceeded the blowup guard or became non-finite."""
