"""Exception hierarchy for the geometry kernel.

Every error raised by the library derives from GeometryError, so callers
(and the CLI) can map failures to exit codes without matching strings.
"""

from __future__ import annotations


class GeometryError(Exception):
    """Base class for all library errors."""


class DegenerateMetric(GeometryError):
    """First fundamental form is numerically singular (chart breakdown)."""


class OutOfDomain(GeometryError):
    """Requested point lies outside the declared open chart domain."""


class StencilOutOfDomain(OutOfDomain):
    """A finite-difference stencil would leave the chart domain."""


class UnsupportedMode(GeometryError):
    """The surface family does not provide the requested evaluation mode."""


class QuadratureFailure(GeometryError):
    """Adaptive quadrature could not reach the requested tolerance."""


class RadicandNonpositive(GeometryError):
    """The quadrature radicand is not positive on the integration interval."""

    def __init__(self, message: str, tau: float):
        super().__init__(message)
        self.tau = tau


class HypothesisViolated(GeometryError):
    """A theorem hypothesis (e.g. c - K > 0, grad K != 0) fails at the point."""


class Blowup(GeometryError):
    """State of an ODE integration exceeded the overflow guard."""


class DomainExit(GeometryError):
    """An integrated trajectory left the domain it must stay in."""


class ConfigError(GeometryError):
    """Malformed CLI/run configuration (maps to exit code 2)."""
