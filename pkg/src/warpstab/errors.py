"""Exception types shared across the package."""

from __future__ import annotations


class WarpstabError(Exception):
    """Base class for all package errors."""


class InvalidParameters(WarpstabError):
    """Model or operation parameters violate a precondition."""


class OutOfDomain(WarpstabError):
    """Requested point lies outside the model's domain (or too close to a
    coordinate pole for finite differencing)."""


class IntegrationError(WarpstabError):
    """An ODE or quadrature routine failed its accuracy check."""


class HypothesisViolated(WarpstabError):
    """A theorem's curvature hypothesis does not hold on the given interval."""


class EmbeddingError(WarpstabError):
    """No rotational embedding into a flat 4-space exists (tangential
    curvature vanishes or changes sign on the interval)."""
