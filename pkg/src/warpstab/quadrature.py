"""Quadrature rules: product Gauss-Legendre rules on the round 2-sphere and
panel-based cumulative integration on an interval.

The sphere rule pairs Gauss-Legendre nodes in cos(phi1) with a uniform
periodic rule in phi2.  With n Gauss nodes and 2n azimuthal points the rule
integrates spherical harmonics of degree <= 2n-1 exactly, and its weights sum
to 4*pi (the area of the unit sphere) by construction.

Cumulative integration supports integrands with an inverse-square-root
singularity at either interval end.  Those panels are handled with the
substitution x = a + xi^2 (resp. x = b - xi^2), which turns C/sqrt(x - a)
into a smooth integrand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError, InvalidParameters

__all__ = [
    "SphereRule",
    "sphere_rule",
    "gauss_legendre",
    "panel_integral",
    "cumulative_integral",
    "integrate_slice",
]


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    if n < 1:
        raise InvalidParameters(f"need at least one node, got {n}")
    return np.polynomial.legendre.leggauss(n)


@dataclass(frozen=True)
class SphereRule:
    """Product quadrature rule on the unit 2-sphere.

    phi1 runs over Gauss-Legendre nodes mapped through cos(phi1) in [-1, 1],
    phi2 over a uniform periodic grid.  Weight of node (i, j) is
    w1[i] * (2*pi / len(phi2)).
    """

    order: int
    phi1: np.ndarray
    w1: np.ndarray
    phi2: np.ndarray

    @property
    def w2(self) -> float:
        return 2.0 * np.pi / len(self.phi2)

    def grids(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Meshed (phi1, phi2, weight) arrays of shape (order, n_phi2)."""
        p1, p2 = np.meshgrid(self.phi1, self.phi2, indexing="ij")
        w = np.broadcast_to(self.w1[:, None] * self.w2, p1.shape)
        return p1, p2, w

    def integrate(self, f) -> float:
        """Integral of f(phi1, phi2) over the unit sphere.

        f must accept numpy arrays and broadcast elementwise.
        """
        p1, p2, w = self.grids()
        vals = np.asarray(f(p1, p2), dtype=float)
        return float(np.sum(w * vals))


def sphere_rule(order: int) -> SphereRule:
    """Build the product rule with `order` polar nodes and 2*order azimuthal."""
    if order < 2:
        raise InvalidParameters(f"order must be >= 2, got {order}")
    x, w = gauss_legendre(order)
    # x = cos(phi1); descending phi1 order does not matter for sums
    phi1 = np.arccos(x)
    m = 2 * order
    phi2 = 2.0 * np.pi * np.arange(m) / m
    return SphereRule(order=order, phi1=phi1, w1=w, phi2=phi2)


def _gl_cache(n: int) -> tuple[np.ndarray, np.ndarray]:
    cached = _gl_cache._store.get(n)
    if cached is None:
        cached = gauss_legendre(n)
        _gl_cache._store[n] = cached
    return cached


_gl_cache._store = {}


def panel_integral(f, a: float, b: float, n: int = 24, singular: str | None = None) -> float:
    """Integral of f over [a, b] by one n-point Gauss-Legendre panel.

    singular = "left" ("right") applies the square-root substitution at a (b)
    for integrands behaving like C / sqrt(x - a) (C / sqrt(b - x)).
    """
    if b < a:
        raise InvalidParameters(f"empty panel [{a}, {b}]")
    if b == a:
        return 0.0
    x, w = _gl_cache(n)
    if singular is None:
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        return float(half * np.dot(w, np.asarray(f(mid + half * x), dtype=float)))
    width = np.sqrt(b - a)
    xi = 0.5 * width * (x + 1.0)
    if singular == "left":
        vals = np.asarray(f(a + xi * xi), dtype=float)
    elif singular == "right":
        vals = np.asarray(f(b - xi * xi), dtype=float)
    else:
        raise InvalidParameters(f"unknown singularity side {singular!r}")
    return float(0.5 * width * np.dot(w, 2.0 * xi * vals))


def cumulative_integral(
    f,
    grid: np.ndarray,
    n: int = 24,
    singular_left: bool = False,
    singular_right: bool = False,
) -> np.ndarray:
    """Antiderivative samples F with F[0] = 0 and F[k] = int_{grid[0]}^{grid[k]} f.

    The grid must be strictly increasing.  Set singular_left/right when f has
    an inverse-square-root blowup at the first/last grid point; the endpoint
    panels then use the substituted rule and f is never evaluated there.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2:
        raise InvalidParameters("grid must be 1-d with at least two points")
    if np.any(np.diff(grid) <= 0):
        raise InvalidParameters("grid must be strictly increasing")
    out = np.zeros(len(grid))
    acc = 0.0
    last = len(grid) - 2
    for k in range(len(grid) - 1):
        side = None
        if k == 0 and singular_left:
            side = "left"
        elif k == last and singular_right:
            side = "right"
        acc += panel_integral(f, grid[k], grid[k + 1], n=n, singular=side)
        out[k + 1] = acc
    return out


def integrate_slice(f, model, t: float, order: int = 16) -> float:
    """Integral of the field f(phi1, phi2) over the slice {t} x S^2.

    The slice is a round sphere of radius h(t), so the measure is h^2 times
    the unit-sphere measure.  The result is checked by doubling the rule
    order; disagreement beyond 1e-8 relative raises IntegrationError.
    """
    h = model.eval(t)[0]
    coarse = sphere_rule(order).integrate(f)
    fine = sphere_rule(2 * order).integrate(f)
    if abs(fine - coarse) > 1e-8 * max(1.0, abs(fine)):
        raise IntegrationError(
            f"order {order} too low: doubled-order values differ by "
            f"{abs(fine - coarse):.3e}"
        )
    return h * h * fine
