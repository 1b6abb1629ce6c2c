"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class GeometryError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(GeometryError, ValueError):
    """An input lies outside the domain of an operation.

    ``param`` names the offending parameter so front ends can report it.
    """

    def __init__(self, message: str, param: str | None = None):
        super().__init__(message)
        self.param = param


class DegenerateParams(DomainError):
    """Gradient-bound constants with C^Sigma = C^F = 0."""


class UnreachableConfig(DomainError):
    """No comparison point exists at the requested distance."""


class InsufficientSamples(DomainError):
    """Too few sample points landed in the requested window."""


class ArityError(DomainError):
    """A bound list is shorter than the requested derivative order needs."""


class ShapeError(DomainError):
    """Sample arrays do not line up."""


class BandError(DomainError):
    """Exhaustion bands are missing or not contiguous."""


class NumericalError(GeometryError):
    """A numerical primitive failed; ``diagnostics`` holds iteration data."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class BracketError(NumericalError):
    """The supplied bracket does not enclose a sign change."""


class NoConvergence(NumericalError):
    """An iteration stopped before meeting its tolerance."""


class NotFound(GeometryError, LookupError):
    """A search finished without locating the requested object."""
