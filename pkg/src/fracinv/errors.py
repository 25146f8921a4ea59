"""Exception types shared across the package."""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid or unreadable experiment / problem configuration."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to reach its accuracy target.

    ``estimate`` carries the achieved error estimate when one is available.
    """

    def __init__(self, message: str, estimate: float | None = None) -> None:
        super().__init__(message)
        self.estimate = estimate
