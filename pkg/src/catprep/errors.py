"""Exception types shared across the package."""

from __future__ import annotations


class CircuitError(ValueError):
    """Invalid circuit, tree or wiring."""


class ResourceError(RuntimeError):
    """An enumeration exceeded its configured element budget."""

    def __init__(self, message: str, *, size: int | None = None, budget: int | None = None) -> None:
        super().__init__(message)
        self.size = size
        self.budget = budget


class FormatError(ValueError):
    """A solution or circuit file could not be parsed."""
