"""Warping functions for 3-d warped products I x S^2 with metric dt^2 + h(t)^2 dw^2.

Every model exposes

    eval(t)     -> (h, h', h'')      at a point of the t-domain
    t_domain()  -> (0.0, t_max)      evaluable range (t_max may be a cap)
    kind        -> short model name

Four families are provided:

* space forms            h = t, sin(sqrt(c) t)/sqrt(c), sinh(sqrt(-c) t)/sqrt(-c)
* first-integral models  h'^2 = phi(h), h(0) = s0 with phi(s0) = 0; this
  covers the static charged/cosmological black-hole warpings
      phi(r) = 1 - m/r - c r^2         (mass m, cosmological sign c)
      phi(r) = 1 - m/r + q^2/r^2       (mass m, charge q)
  evaluated by inverting t(r) = int_{s0}^r dr'/sqrt(phi(r')), plus arbitrary
  user-supplied phi for experiments
* profile models         h(t) = u(s(t)) for a positive profile u over s, with
  t the arc length of the graph of u (rotational hypersurfaces)
* closed-form models     caller-supplied (h, h', h'') callables

t(r) has an integrable 1/sqrt singularity wherever phi vanishes; those panels
are integrated under the substitution r = s0 + xi^2 (or s1 - xi^2), after
which the integrand is smooth.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .csvout import write_csv
from .errors import IntegrationError, InvalidParameters, OutOfDomain
from .quadrature import cumulative_integral, panel_integral

__all__ = [
    "Trajectory",
    "SpaceForm",
    "FirstIntegralModel",
    "DeSitterSchwarzschild",
    "ReissnerNordstrom",
    "ProfileModel",
    "ClosedFormModel",
    "space_form_h",
    "dss_domain",
    "rn_s0",
    "integrate_h",
    "profile_reparametrize",
    "ellipsoid_model",
    "hyperboloid_model",
    "default_cap",
]


def default_cap() -> float:
    """Evaluation cap for models with an unbounded domain.

    Read from the WARPSTAB_CAP environment variable (default 50).  For
    first-integral models the cap bounds the radius h; for space forms and
    closed-form models it bounds t.
    """
    raw = os.environ.get("WARPSTAB_CAP", "50.0")
    try:
        cap = float(raw)
    except ValueError as exc:
        raise InvalidParameters(f"WARPSTAB_CAP={raw!r} is not a number") from exc
    if not cap > 0:
        raise InvalidParameters(f"WARPSTAB_CAP must be positive, got {cap}")
    return cap


# ---------------------------------------------------------------------------
# space forms


def space_form_h(c: float, t: float) -> tuple[float, float, float]:
    """(h, h', h'') of the simply connected space form of curvature c.

    Domain: t in (0, pi/sqrt(c)) for c > 0, t > 0 otherwise.
    """
    if t <= 0.0:
        raise OutOfDomain(f"t must be positive, got {t}")
    if c > 0.0:
        rc = math.sqrt(c)
        if t >= math.pi / rc:
            raise OutOfDomain(f"t must stay below pi/sqrt(c) = {math.pi / rc}")
        return math.sin(rc * t) / rc, math.cos(rc * t), -rc * math.sin(rc * t)
    if c < 0.0:
        rc = math.sqrt(-c)
        return math.sinh(rc * t) / rc, math.cosh(rc * t), rc * math.sinh(rc * t)
    return t, 1.0, 0.0


class SpaceForm:
    """Constant-curvature model: both sectional curvatures equal c."""

    def __init__(self, c: float, cap: float | None = None):
        self.c = float(c)
        self.unbounded = self.c <= 0.0
        if self.c > 0.0:
            self._t_max = math.pi / math.sqrt(self.c)
        else:
            self._t_max = cap if cap is not None else default_cap()

    kind = "space_form"

    def __repr__(self):
        return f"SpaceForm(c={self.c})"

    def t_domain(self) -> tuple[float, float]:
        return 0.0, self._t_max

    def eval(self, t: float) -> tuple[float, float, float]:
        if self.c <= 0.0 and t > self._t_max * (1 + 1e-12):
            raise OutOfDomain(f"t = {t} beyond cap {self._t_max}")
        return space_form_h(self.c, t)

    def hppp(self, t: float) -> float:
        return -self.c * self.eval(t)[1]

    # ODE interface used by integrate_h
    def accel(self, h: float) -> float:
        return -self.c * h

    def daccel(self, h: float) -> float:
        return -self.c

    def phi(self, h: float) -> float:
        return 1.0 - self.c * h * h

    def initial_state(self) -> tuple[float, float]:
        return 0.0, 1.0

    def h_bounds(self) -> tuple[float, float]:
        return 0.0, math.inf


# ---------------------------------------------------------------------------
# first-integral models: h'^2 = phi(h)


def dss_domain(m: float, c: float) -> tuple[float, float]:
    """Radial domain (s0, s1) on which 1 - m/r - c r^2 > 0.

    s1 is finite exactly when c > 0, which additionally requires
    c m^2 < 4/27 for the domain to be nonempty.
    """
    if m <= 0.0:
        raise InvalidParameters(f"mass must be positive, got m={m}")
    if c == 0.0:
        return m, math.inf
    if c < 0.0:
        # phi is increasing in r with a single positive root
        lo = min(m, 1.0 / math.sqrt(-c)) * 1e-8
        hi = max(m, 1.0 / math.sqrt(-c))
        phi = lambda r: 1.0 - m / r - c * r * r
        while phi(hi) <= 0.0:
            hi *= 2.0
        return brentq(phi, lo, hi, xtol=1e-14), math.inf
    if c * m * m >= 4.0 / 27.0:
        raise InvalidParameters(
            f"empty domain: need c*m^2 < 4/27, got {c * m * m:.6g}"
        )
    # roots of psi(r) = c r^3 - r + m; phi = -psi/r, so phi > 0 iff psi < 0
    psi = lambda r: c * r**3 - r + m
    r_min = 1.0 / math.sqrt(3.0 * c)
    s0 = brentq(psi, 1e-300, r_min, xtol=1e-14)
    hi = 2.0 * r_min
    while psi(hi) <= 0.0:
        hi *= 2.0
    s1 = brentq(psi, r_min, hi, xtol=1e-14)
    return s0, s1


def rn_s0(m: float, q: float) -> float:
    """Horizon radius: the larger root of r^2 - m r + q^2 = 0.

    Requires m > 2q > 0.  Written to avoid cancellation as q -> m/2.
    """
    if not (q > 0.0 and m > 2.0 * q):
        raise InvalidParameters(f"need m > 2q > 0, got m={m}, q={q}")
    return 0.5 * (m + math.sqrt(m * m - 4.0 * q * q))


class FirstIntegralModel:
    """Warping defined by h'(t)^2 = phi(h(t)), increasing branch.

    The t-parametrization comes from t(r) = int_{r_lo}^r dr'/sqrt(phi(r'))
    tabulated once on a panel grid and inverted by bracketed root-finding.
    Endpoints where phi vanishes (simple zeros) get the square-root panel
    substitution automatically.
    """

    kind = "first_integral"

    def __init__(
        self,
        phi,
        dphi,
        d2phi,
        r_lo: float,
        r_hi: float,
        *,
        unbounded: bool = False,
        n_panels: int = 96,
        panel_nodes: int = 24,
    ):
        if not r_hi > r_lo:
            raise InvalidParameters(f"need r_hi > r_lo, got [{r_lo}, {r_hi}]")
        self.phi = phi
        self.dphi = dphi
        self.d2phi = d2phi
        self.r_lo = float(r_lo)
        self.r_hi = float(r_hi)
        self.unbounded = unbounded
        self._nodes = panel_nodes
        self._singular_lo = abs(phi(self.r_lo)) < 1e-10
        self._singular_hi = abs(phi(self.r_hi)) < 1e-10
        self._rgrid = np.linspace(self.r_lo, self.r_hi, n_panels + 1)
        self._tgrid = cumulative_integral(
            self._integrand,
            self._rgrid,
            n=panel_nodes,
            singular_left=self._singular_lo,
            singular_right=self._singular_hi,
        )
        self._memo: dict[float, tuple[float, float, float]] = {}

    def _integrand(self, r):
        return 1.0 / np.sqrt(self.phi(r))

    def t_domain(self) -> tuple[float, float]:
        return 0.0, float(self._tgrid[-1])

    def t_of_r(self, r: float) -> float:
        """Arc time t at radius r, from the table plus one partial panel."""
        r = self._check_r(r)
        k = int(np.clip(np.searchsorted(self._rgrid, r, side="right") - 1,
                        0, len(self._rgrid) - 2))
        if k == 0 and self._singular_lo:
            return float(panel_integral(
                self._integrand, self._rgrid[0], r, n=self._nodes, singular="left"))
        if k == len(self._rgrid) - 2 and self._singular_hi:
            tail = panel_integral(
                self._integrand, r, self._rgrid[-1], n=self._nodes, singular="right")
            return float(self._tgrid[-1] - tail)
        return float(self._tgrid[k] + panel_integral(
            self._integrand, self._rgrid[k], r, n=self._nodes))

    def r_of_t(self, t: float) -> float:
        """Radius at arc time t (inverse of t_of_r, bracketed root-finding)."""
        t_max = self._tgrid[-1]
        if t < -1e-12 or t > t_max * (1 + 1e-12):
            raise OutOfDomain(f"t = {t} outside [0, {t_max}]")
        t = min(max(t, 0.0), t_max)
        if t == 0.0:
            return self.r_lo
        if t == t_max:
            return self.r_hi
        k = int(np.clip(np.searchsorted(self._tgrid, t, side="right") - 1,
                        0, len(self._tgrid) - 2))
        return brentq(lambda r: self.t_of_r(r) - t,
                      self._rgrid[k], self._rgrid[k + 1], xtol=1e-14)

    def _check_r(self, r: float) -> float:
        slack = 1e-9 * max(1.0, abs(self.r_hi))
        if r < self.r_lo - slack or r > self.r_hi + slack:
            raise OutOfDomain(f"r = {r} outside [{self.r_lo}, {self.r_hi}]")
        return min(max(r, self.r_lo), self.r_hi)

    def eval_r(self, r: float) -> tuple[float, float, float]:
        """(h, h', h'') at radius r; h' is the increasing-branch root."""
        r = self._check_r(r)
        return r, math.sqrt(max(self.phi(r), 0.0)), 0.5 * self.dphi(r)

    def eval(self, t: float) -> tuple[float, float, float]:
        hit = self._memo.get(t)
        if hit is None:
            hit = self.eval_r(self.r_of_t(t))
            self._memo[t] = hit
        return hit

    def hppp(self, t: float) -> float:
        h, hp, _ = self.eval(t)
        return 0.5 * self.d2phi(h) * hp

    # ODE interface used by integrate_h
    def accel(self, h: float) -> float:
        return 0.5 * self.dphi(h)

    def daccel(self, h: float) -> float:
        return 0.5 * self.d2phi(h)

    def initial_state(self) -> tuple[float, float]:
        return self.r_lo, math.sqrt(max(self.phi(self.r_lo), 0.0))

    def h_bounds(self) -> tuple[float, float]:
        hi = math.inf if self.unbounded else self.r_hi
        return self.r_lo, hi


class DeSitterSchwarzschild(FirstIntegralModel):
    """phi(r) = 1 - m/r - c r^2 on (s0, s1); s1 finite exactly when c > 0."""

    kind = "dss"

    def __init__(self, m: float, c: float, cap: float | None = None, **kw):
        self.m = float(m)
        self.c = float(c)
        s0, s1 = dss_domain(self.m, self.c)
        self.s0, self.s1 = s0, s1
        if math.isinf(s1):
            r_hi = cap if cap is not None else default_cap()
            if r_hi <= s0:
                raise InvalidParameters(f"cap {r_hi} is inside the horizon r <= {s0}")
        else:
            r_hi = s1
        m_, c_ = self.m, self.c
        super().__init__(
            phi=lambda r: 1.0 - m_ / r - c_ * r * r,
            dphi=lambda r: m_ / (r * r) - 2.0 * c_ * r,
            d2phi=lambda r: -2.0 * m_ / r**3 - 2.0 * c_,
            r_lo=s0,
            r_hi=r_hi,
            unbounded=math.isinf(s1),
            **kw,
        )

    def __repr__(self):
        return f"DeSitterSchwarzschild(m={self.m}, c={self.c})"


class ReissnerNordstrom(FirstIntegralModel):
    """phi(r) = 1 - m/r + q^2/r^2 outside the horizon, m > 2q > 0."""

    kind = "rn"

    def __init__(self, m: float, q: float, cap: float | None = None, **kw):
        self.m = float(m)
        self.q = float(q)
        s0 = rn_s0(self.m, self.q)
        self.s0, self.s1 = s0, math.inf
        r_hi = cap if cap is not None else default_cap()
        if r_hi <= s0:
            raise InvalidParameters(f"cap {r_hi} is inside the horizon r <= {s0}")
        m_, q2 = self.m, self.q * self.q
        super().__init__(
            phi=lambda r: 1.0 - m_ / r + q2 / (r * r),
            dphi=lambda r: m_ / (r * r) - 2.0 * q2 / r**3,
            d2phi=lambda r: -2.0 * m_ / r**3 + 6.0 * q2 / r**4,
            r_lo=s0,
            r_hi=r_hi,
            unbounded=True,
            **kw,
        )

    def __repr__(self):
        return f"ReissnerNordstrom(m={self.m}, q={self.q})"


# ---------------------------------------------------------------------------
# profile models (rotational hypersurfaces)


def _fd4_derivatives(s: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """4th-order finite-difference u' and u'' on a uniform grid."""
    ds = s[1] - s[0]
    if not np.allclose(np.diff(s), ds, rtol=1e-10, atol=0):
        raise InvalidParameters("sampled profiles need a uniform s-grid")
    n = len(s)
    if n < 7:
        raise InvalidParameters("need at least 7 samples for 4th-order stencils")
    up = np.empty(n)
    upp = np.empty(n)
    # interior: standard 5-point central stencils
    up[2:-2] = (u[:-4] - 8 * u[1:-3] + 8 * u[3:-1] - u[4:]) / (12 * ds)
    upp[2:-2] = (-u[:-4] + 16 * u[1:-3] - 30 * u[2:-2] + 16 * u[3:-1] - u[4:]) / (
        12 * ds * ds
    )
    # ends: one-sided stencils of the same order
    c1 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
    c1b = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
    c2 = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0
    c2b = np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0
    up[0] = np.dot(c1, u[:5]) / ds
    up[1] = np.dot(c1b, u[:5]) / ds
    up[-1] = -np.dot(c1, u[-5:][::-1]) / ds
    up[-2] = -np.dot(c1b, u[-5:][::-1]) / ds
    upp[0] = np.dot(c2, u[:6]) / (ds * ds)
    upp[1] = np.dot(c2b, u[:6]) / (ds * ds)
    upp[-1] = np.dot(c2, u[-6:][::-1]) / (ds * ds)
    upp[-2] = np.dot(c2b, u[-6:][::-1]) / (ds * ds)
    return up, upp


class _SampledProfile:
    """Evaluate a uniformly sampled profile between nodes with local
    degree-4 polynomials (same accuracy as the 4th-order stencils)."""

    def __init__(self, s: np.ndarray, u: np.ndarray):
        self.s = np.asarray(s, dtype=float)
        self.u = np.asarray(u, dtype=float)
        _fd4_derivatives(self.s, self.u)  # validates grid shape/uniformity

    def _local_poly(self, x: float):
        i = int(np.clip(np.searchsorted(self.s, x) - 2, 0, len(self.s) - 5))
        sl = slice(i, i + 5)
        return np.polynomial.Polynomial.fit(self.s[sl], self.u[sl], 4)

    def value(self, x: float) -> float:
        return float(self._local_poly(x)(x))

    def deriv1(self, x: float) -> float:
        return float(self._local_poly(x).deriv(1)(x))

    def deriv2(self, x: float) -> float:
        return float(self._local_poly(x).deriv(2)(x))


class ProfileModel:
    """h(t) = u(s(t)) where t is arc length along the graph of u.

    With g = sqrt(1 + u'^2):  h' = u'/g  and  h'' = u''/g^4.
    The tangential curvature (1 - h'^2)/h^2 = 1/(u^2 g^2) is positive for
    every positive profile, so these models always embed with kappa = +1.
    """

    kind = "profile"

    def __init__(self, u, up, upp, s_interval: tuple[float, float],
                 n_panels: int = 96, panel_nodes: int = 24):
        s_lo, s_hi = map(float, s_interval)
        if not s_hi > s_lo:
            raise InvalidParameters(f"empty s-interval [{s_lo}, {s_hi}]")
        self.u, self.up, self.upp = u, up, upp
        self.s_lo, self.s_hi = s_lo, s_hi
        self.unbounded = False
        self._nodes = panel_nodes
        self._sgrid = np.linspace(s_lo, s_hi, n_panels + 1)
        probe = np.array([float(u(s)) for s in self._sgrid])
        if np.min(probe) <= 0.0:
            raise InvalidParameters("profile u must stay positive on the interval")
        self._tgrid = cumulative_integral(self._speed, self._sgrid, n=panel_nodes)
        self._memo: dict[float, tuple[float, float, float]] = {}

    def _speed(self, s):
        s = np.asarray(s, dtype=float)
        ups = np.array([float(self.up(x)) for x in np.atleast_1d(s)])
        out = np.sqrt(1.0 + ups * ups)
        return out if s.ndim else float(out[0])

    def t_domain(self) -> tuple[float, float]:
        return 0.0, float(self._tgrid[-1])

    def t_of_s(self, s: float) -> float:
        if s < self.s_lo - 1e-12 or s > self.s_hi + 1e-12:
            raise OutOfDomain(f"s = {s} outside [{self.s_lo}, {self.s_hi}]")
        s = min(max(s, self.s_lo), self.s_hi)
        k = int(np.clip(np.searchsorted(self._sgrid, s, side="right") - 1,
                        0, len(self._sgrid) - 2))
        return float(self._tgrid[k] + panel_integral(
            self._speed, self._sgrid[k], s, n=self._nodes))

    def s_of_t(self, t: float) -> float:
        t_max = self._tgrid[-1]
        if t < -1e-12 or t > t_max * (1 + 1e-12):
            raise OutOfDomain(f"t = {t} outside [0, {t_max}]")
        t = min(max(t, 0.0), t_max)
        if t == 0.0:
            return self.s_lo
        if t == t_max:
            return self.s_hi
        k = int(np.clip(np.searchsorted(self._tgrid, t, side="right") - 1,
                        0, len(self._tgrid) - 2))
        return brentq(lambda s: self.t_of_s(s) - t,
                      self._sgrid[k], self._sgrid[k + 1], xtol=1e-14)

    def eval_s(self, s: float) -> tuple[float, float, float]:
        h = float(self.u(s))
        d1 = float(self.up(s))
        d2 = float(self.upp(s))
        g2 = 1.0 + d1 * d1
        return h, d1 / math.sqrt(g2), d2 / (g2 * g2)

    def eval(self, t: float) -> tuple[float, float, float]:
        hit = self._memo.get(t)
        if hit is None:
            hit = self.eval_s(self.s_of_t(t))
            self._memo[t] = hit
        return hit


def profile_reparametrize(u, s_interval: tuple[float, float] | None = None,
                          up=None, upp=None, n_grid: int = 1025) -> ProfileModel:
    """Build a ProfileModel from a profile u > 0.

    u may be a callable (analytic up/upp optional; dense sampling plus
    4th-order finite differences otherwise) or an array of uniform samples
    over s_interval.
    """
    if callable(u):
        if s_interval is None:
            raise InvalidParameters("callable profiles need an s-interval")
        if up is not None and upp is not None:
            return ProfileModel(u, up, upp, s_interval)
        s = np.linspace(s_interval[0], s_interval[1], n_grid)
        vals = np.array([float(u(x)) for x in s])
    else:
        vals = np.asarray(u, dtype=float)
        if s_interval is None:
            raise InvalidParameters("sampled profiles need an s-interval")
        s = np.linspace(s_interval[0], s_interval[1], len(vals))
    sp = _SampledProfile(s, vals)
    return ProfileModel(sp.value, sp.deriv1, sp.deriv2,
                        (float(s[0]), float(s[-1])))


def ellipsoid_model(b: float, margin: float = 1e-3) -> ProfileModel:
    """Rotational ellipsoid profile u(s) = sqrt(b^2 - s^2)/b.

    The s-interval is inset by `margin` (relative) on both sides because u'
    blows up at s = +-b.
    """
    if b <= 0.0:
        raise InvalidParameters(f"axis ratio b must be positive, got {b}")
    bb = b * b

    def u(s):
        return math.sqrt(bb - s * s) / b

    def up(s):
        return -s / (b * math.sqrt(bb - s * s))

    def upp(s):
        return -b / (bb - s * s) ** 1.5

    s_max = b * (1.0 - margin)
    mdl = ProfileModel(u, up, upp, (-s_max, s_max))
    mdl.b = float(b)
    return mdl


def hyperboloid_model(b: float, s_max: float = 5.0) -> ProfileModel:
    """One-sheet rotational hyperboloid profile u(s) = sqrt(b^2 + s^2)/b."""
    if b <= 0.0:
        raise InvalidParameters(f"axis ratio b must be positive, got {b}")
    if s_max <= 0.0:
        raise InvalidParameters(f"s_max must be positive, got {s_max}")
    bb = b * b

    def u(s):
        return math.sqrt(bb + s * s) / b

    def up(s):
        return s / (b * math.sqrt(bb + s * s))

    def upp(s):
        return b / (bb + s * s) ** 1.5

    mdl = ProfileModel(u, up, upp, (-s_max, s_max))
    mdl.b = float(b)
    return mdl


class ClosedFormModel:
    """Caller-supplied (h, h', h'') callables on a t-interval."""

    def __init__(self, h, hp, hpp, t_interval: tuple[float, float],
                 hppp=None, kind: str = "custom", unbounded: bool = False):
        self._h, self._hp, self._hpp, self._hppp = h, hp, hpp, hppp
        self._t0, self._t1 = map(float, t_interval)
        self.kind = kind
        self.unbounded = unbounded

    def t_domain(self) -> tuple[float, float]:
        return self._t0, self._t1

    def eval(self, t: float) -> tuple[float, float, float]:
        if t < self._t0 - 1e-12 or t > self._t1 * (1 + 1e-12) + 1e-12:
            raise OutOfDomain(f"t = {t} outside [{self._t0}, {self._t1}]")
        return float(self._h(t)), float(self._hp(t)), float(self._hpp(t))

    def __getattr__(self, name):
        if name == "hppp" and self._hppp is not None:
            return lambda t: float(self._hppp(t))
        raise AttributeError(name)


# ---------------------------------------------------------------------------
# trajectory integration


@dataclass(frozen=True)
class Trajectory:
    """Samples of h(t) obtained by integrating h'' = accel(h).

    residual holds |h'^2 - phi(h)| per sample: the first integral is conserved
    along exact solutions, so its drift measures integration error.
    """

    kind: str
    step: float
    t: np.ndarray
    h: np.ndarray
    hp: np.ndarray
    hpp: np.ndarray
    residual: np.ndarray

    @property
    def residual_max(self) -> float:
        return float(np.max(self.residual))

    def to_csv(self, target) -> None:
        write_csv(target, ["t", "h", "hp", "hpp", "residual"],
                  zip(self.t, self.h, self.hp, self.hpp, self.residual))


def integrate_h(model, t_max: float, step: float = 1e-3,
                residual_tol: float = 1e-8) -> Trajectory:
    """Integrate the warping ODE with classical RK4 at a uniform step.

    Starts from the model's initial data.  When h'(0) = 0 (the first-integral
    models start at a simple zero of phi) the first step is taken with a
    degree-4 Taylor expansion: h is even there, so odd terms drop out.

    Raises IntegrationError when the first-integral residual exceeds
    residual_tol ("step too large") and OutOfDomain when h leaves the model's
    radial bounds.
    """
    if step <= 0.0 or t_max <= 0.0:
        raise InvalidParameters(f"need positive step and t_max, got {step}, {t_max}")
    n = max(1, int(math.ceil(t_max / step - 1e-12)))
    dt = t_max / n
    if dt > step * (1 + 1e-12):
        raise InvalidParameters("internal step sizing error")

    accel = model.accel
    lo, hi = model.h_bounds()
    h0, v0 = model.initial_state()

    ts = np.linspace(0.0, t_max, n + 1)
    hs = np.empty(n + 1)
    vs = np.empty(n + 1)
    hs[0], vs[0] = h0, v0

    h, v = h0, v0
    start = 0
    if v0 == 0.0:
        # Taylor start: h(dt) = h0 + a dt^2/2 + a'(h0) a dt^4/24
        a = accel(h0)
        da = model.daccel(h0)
        h = h0 + 0.5 * a * dt * dt + da * a * dt**4 / 24.0
        v = a * dt + da * a * dt**3 / 6.0
        hs[1], vs[1] = h, v
        start = 1

    for k in range(start, n):
        k1h, k1v = v, accel(h)
        k2h, k2v = v + 0.5 * dt * k1v, accel(h + 0.5 * dt * k1h)
        k3h, k3v = v + 0.5 * dt * k2v, accel(h + 0.5 * dt * k2h)
        k4h, k4v = v + dt * k3v, accel(h + dt * k3h)
        h += dt * (k1h + 2 * k2h + 2 * k3h + k4h) / 6.0
        v += dt * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0
        hs[k + 1], vs[k + 1] = h, v
        slack = 1e-9 * max(1.0, abs(h))
        if h < lo - slack or h > hi + slack or h <= 0.0:
            raise OutOfDomain(
                f"trajectory left the radial domain at t = {ts[k + 1]:.6g}: h = {h:.6g}"
            )

    hpps = np.array([accel(x) for x in hs])
    res = np.abs(vs * vs - np.array([model.phi(x) for x in hs]))
    if np.max(res) > residual_tol:
        raise IntegrationError(
            f"step {step} too large: first-integral residual {np.max(res):.3e} "
            f"exceeds {residual_tol:.1e}"
        )
    return Trajectory(kind=model.kind, step=dt, t=ts, h=hs, hp=vs,
                      hpp=hpps, residual=res)
