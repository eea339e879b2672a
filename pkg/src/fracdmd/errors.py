"""Exception types shared across the package."""


class FracdmdError(Exception):
    """Base class for package-specific failures."""


class ConditioningError(FracdmdError):
    """A linear solve is numerically singular; increasing ``reg`` usually helps."""


class DivergenceError(FracdmdError):
    """The fractional ODE solver produced a non-finite state.

    Attributes:
        last_valid_time: Largest time for which the state was still finite.
    """

    def __init__(self, message, last_valid_time):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class AccuracyError(FracdmdError):
    """A series evaluation did not reach the requested tolerance.

    Attributes:
        partial: The partial result accumulated before giving up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConfigError(FracdmdError):
    """A CLI configuration file is malformed or references missing inputs."""
