"""Curvature of 3-d warped products, in closed form.

All tensors are expressed in the orthonormal frame (e0, e1, e2) with
e0 = d/dt and e1, e2 tangent to the sphere factor; vectors are numpy arrays
of frame components.  Two numbers determine everything:

    k_tan = (1 - h'^2)/h^2     sectional curvature of planes tangent to a slice
    k_rad = -h''/h             sectional curvature of planes containing e0

Sign convention: sectional curvature of the plane spanned by X, Y is
<R(X,Y)X, Y> / (|X|^2 |Y|^2 - <X,Y>^2) with the curvature operator below, so
the unit round sphere comes out at +1.

For a unit normal N of a hypersurface, nu denotes <N, e0>; the Ricci
curvature in that direction has two equivalent expressions

    Ric(N,N) = 2 k_tan + (k_rad - k_tan)(1 + nu^2)
             = 2 k_rad + (k_tan - k_rad)(1 - nu^2)

and the normalized scalar curvature is scal = (k_tan + 2 k_rad)/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._scan import scan_min
from .errors import InvalidParameters, OutOfDomain

__all__ = [
    "CurvatureState",
    "curvature_state",
    "dss_curvatures_in_r",
    "rn_curvatures_in_r",
    "riemann_apply",
    "sectional_curvature",
    "ricci_normal",
    "ricci_normal_forms",
    "ricci_eigenvalues",
    "scalar_curvature",
    "RadialMonotonicity",
    "radial_monotonicity_condition",
    "ricci_infimum",
]

E0 = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True)
class CurvatureState:
    """Warping data and both sectional curvatures at one point of the base."""

    t: float
    h: float
    hp: float
    hpp: float
    k_tan: float
    k_rad: float

    @classmethod
    def from_warping(cls, t: float, h: float, hp: float, hpp: float) -> "CurvatureState":
        if h <= 0.0:
            raise OutOfDomain(f"warping factor must be positive, got h = {h}")
        return cls(t=t, h=h, hp=hp, hpp=hpp,
                   k_tan=(1.0 - hp * hp) / (h * h), k_rad=-hpp / h)


def curvature_state(model, t: float) -> CurvatureState:
    """Curvature state of the model at parameter t."""
    h, hp, hpp = model.eval(t)
    return CurvatureState.from_warping(t, h, hp, hpp)


def dss_curvatures_in_r(m: float, c: float, r: float) -> tuple[float, float]:
    """(k_tan, k_rad) = (m/r^3 + c, -m/(2 r^3) + c) at radius r."""
    if r <= 0.0:
        raise OutOfDomain(f"radius must be positive, got {r}")
    return m / r**3 + c, -0.5 * m / r**3 + c


def rn_curvatures_in_r(m: float, q: float, r: float) -> tuple[float, float]:
    """(k_tan, k_rad) = ((2m - 2q^2/r)/(2r^3), -(m - 2q^2/r)/(2r^3))."""
    if r <= 0.0:
        raise OutOfDomain(f"radius must be positive, got {r}")
    q2 = q * q
    return (2.0 * m - 2.0 * q2 / r) / (2.0 * r**3), -(m - 2.0 * q2 / r) / (2.0 * r**3)


def riemann_apply(state: CurvatureState, X, Y, Z) -> np.ndarray:
    """Curvature operator R(X,Y)Z in frame components.

    Warped products need only a three-term expression: a constant-curvature
    part at k_tan plus corrections along e0 weighted by k_tan - k_rad.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Z = np.asarray(Z, dtype=float)
    kt, dk = state.k_tan, state.k_tan - state.k_rad
    B = np.dot(X, Z) * Y - np.dot(Y, Z) * X
    return kt * B - dk * (B[0] * E0 + Z[0] * (X[0] * Y - Y[0] * X))


def sectional_curvature(state: CurvatureState, X, Y) -> float:
    """Sectional curvature of span(X, Y); requires a nondegenerate plane."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    gram = np.dot(X, X) * np.dot(Y, Y) - np.dot(X, Y) ** 2
    if gram <= 1e-14 * max(1.0, float(np.dot(X, X) * np.dot(Y, Y))):
        raise InvalidParameters("X and Y do not span a plane")
    return float(np.dot(riemann_apply(state, X, Y, X), Y)) / gram


def _check_nu(nu: float) -> float:
    if abs(nu) > 1.0 + 1e-12:
        raise InvalidParameters(f"normal tilt nu must lie in [-1, 1], got {nu}")
    return min(max(nu, -1.0), 1.0)


def ricci_normal_forms(state: CurvatureState, nu: float) -> tuple[float, float]:
    """Both closed forms of Ric(N,N) for a unit normal with <N, e0> = nu."""
    nu = _check_nu(nu)
    kt, kr = state.k_tan, state.k_rad
    nu2 = nu * nu
    return (2.0 * kt + (kr - kt) * (1.0 + nu2),
            2.0 * kr + (kt - kr) * (1.0 - nu2))


def ricci_normal(state: CurvatureState, nu: float) -> float:
    """Ric(N,N) for a unit normal with tilt nu = <N, e0>."""
    return ricci_normal_forms(state, nu)[0]


def ricci_eigenvalues(state: CurvatureState) -> tuple[float, float, float]:
    """Eigenvalues of the Ricci endomorphism: (2 k_rad, k_tan + k_rad, same)."""
    kt, kr = state.k_tan, state.k_rad
    return 2.0 * kr, kt + kr, kt + kr


def scalar_curvature(state: CurvatureState) -> float:
    """Normalized scalar curvature (k_tan + 2 k_rad)/3."""
    return (state.k_tan + 2.0 * state.k_rad) / 3.0


class RadialMonotonicity(NamedTuple):
    lhs: float   # d(k_rad)/dt
    rhs: float   # (h'/h)(k_tan - k_rad)
    holds: bool  # lhs <= rhs up to 1e-12 slack


def _k_rad_rate(model, t: float) -> float:
    """d(k_rad)/dt, analytic when the model supplies h''', else 4th-order FD."""
    h, hp, hpp = model.eval(t)
    if hasattr(model, "hppp"):
        return -model.hppp(t) / h + hpp * hp / (h * h)
    t0, t1 = model.t_domain()
    dt = min(1e-4 * max(1.0, abs(t)), (t - t0) / 2.5, (t1 - t) / 2.5)
    if dt <= 0.0:
        raise OutOfDomain(f"t = {t} too close to the domain ends for differencing")
    k = lambda s: curvature_state(model, s).k_rad
    return (-k(t + 2 * dt) + 8 * k(t + dt) - 8 * k(t - dt) + k(t - 2 * dt)) / (12 * dt)


def radial_monotonicity_condition(model, t: float, slack: float = 1e-12) -> RadialMonotonicity:
    """Radial curvature monotonicity check d(k_rad)/dt <= (h'/h)(k_tan - k_rad).

    The uncharged black-hole warpings satisfy it with equality; adding charge
    q creates a gap of exactly 2 q^2 h'/h^5.
    """
    st = curvature_state(model, t)
    lhs = _k_rad_rate(model, t)
    rhs = (st.hp / st.h) * (st.k_tan - st.k_rad)
    return RadialMonotonicity(lhs=lhs, rhs=rhs, holds=lhs <= rhs + slack)


def ricci_infimum(model, t_interval: tuple[float, float], n: int = 512) -> float:
    """Infimum over the interval of the smallest Ricci eigenvalue.

    The eigenvalues are 2 k_rad and k_tan + k_rad (double), so the pointwise
    minimum of those two is scanned and polished.
    """
    a, b = map(float, t_interval)
    t0, t1 = model.t_domain()
    if not b > a:
        raise OutOfDomain(f"empty interval [{a}, {b}]")
    if a < t0 - 1e-12 or b > t1 * (1 + 1e-12) + 1e-12:
        raise OutOfDomain(f"interval [{a}, {b}] not inside domain [{t0}, {t1}]")

    def worst(t: float) -> float:
        st = curvature_state(model, t)
        return min(2.0 * st.k_rad, st.k_tan + st.k_rad)

    value, _ = scan_min(worst, a, b, n=n)
    return value
