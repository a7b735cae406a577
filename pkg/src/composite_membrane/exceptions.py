"""
Exception hierarchy for the composite membrane package.
"""

from typing import Optional


class MembraneError(Exception):
    """Base class for all package errors."""


class InvalidInputError(MembraneError, ValueError):
    """An argument violates an operation's precondition."""


class ConfigError(InvalidInputError):
    """A run-config entry is unknown, malformed or out of range."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class ConvergenceError(MembraneError):
    """An iterative solver stopped before meeting its tolerance."""

    def __init__(self, message: str, last_residual: Optional[float] = None, iterations: int = 0):
        self.last_residual = last_residual
        self.iterations = iterations
        super().__init__(f"{message} (iterations={iterations}, last residual={last_residual})")


class ExtractionError(MembraneError):
    """A contour or boundary could not be extracted."""


class NoProfileError(MembraneError):
    """No homogeneous two-phase profile exists or was found for the given coefficients."""
