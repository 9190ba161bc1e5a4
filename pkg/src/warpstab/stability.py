"""Stability thresholds for CMC hypersurfaces of 3-d warped products.

Slices {t} x S^2 are totally umbilic round spheres of radius h(t) with mean
curvature H = h'/h and unit normal tilt nu = -1.  Their Jacobi operator
diagonalizes over spherical harmonics with eigenvalues

    mu_l = l(l+1)/h^2 - 2 k_rad - 2 H^2,        l = 1, 2, ...

and the first slice Laplacian eigenvalue obeys the exact identity
lambda_1 = 2 (H^2 + k_tan) = 2/h^2.

For general CMC surfaces the second variation is controlled through the
quadratic polynomial (y = 1 - nu^2 in [0, 1])

    p(y)   = 4 (1 + eps) - 2 eps y - eps^2 y^2
    p_a(y) = 4 (H_a^2 + 1 + eps) - 2 eps y - eps^2 y^2,     H_a = H/a

where a and eps describe the shape operator of the ambient isometric
embedding into flat 4-space: one principal value a of multiplicity 3 plus a
radial correction eps*a.  p stays nonnegative on [0, 1] exactly for eps in
the window [-1, 1 + sqrt(5)]; outside the window stability needs an explicit
mean-curvature threshold, h2_threshold below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import embedding as _embedding
from ._scan import scan_max, scan_min
from .curvature import curvature_state, ricci_infimum, ricci_normal, scalar_curvature
from .errors import HypothesisViolated, InvalidParameters, OutOfDomain
from .quadrature import integrate_slice

__all__ = [
    "EPS_WINDOW_LO",
    "EPS_WINDOW_HI",
    "ThresholdCheck",
    "SliceReport",
    "slice_report",
    "thm_slice_hypothesis",
    "slice_threshold_radius",
    "slice_threshold_radius_closed",
    "slice_monotonicity",
    "Supremum",
    "stab_main_threshold",
    "p_poly",
    "p_a_poly",
    "eps_window_check",
    "h2_threshold",
    "StabilityWindow",
    "delta_thresholds",
    "C0Result",
    "c0",
    "QSumInput",
    "qsum",
    "qsum_general",
    "codim1_ii_terms",
    "GeneralThresholds",
    "general_threshold",
    "SliceIntegrals",
    "slice_integral_checks",
]

EPS_WINDOW_LO = -1.0
EPS_WINDOW_HI = 1.0 + math.sqrt(5.0)


def _interval(model, t_interval) -> tuple[float, float]:
    a, b = map(float, t_interval)
    if not b > a:
        raise InvalidParameters(f"empty interval [{a}, {b}]")
    t0, t1 = model.t_domain()
    if a < t0 - 1e-12 or b > t1 * (1 + 1e-12) + 1e-12:
        raise OutOfDomain(f"interval [{a}, {b}] not inside domain [{t0}, {t1}]")
    return a, b


# ---------------------------------------------------------------------------
# slice spectra and the slice theorems


@dataclass(frozen=True)
class ThresholdCheck:
    """One named inequality actual >= required, with a boundary flag."""

    name: str
    required: float
    actual: float
    satisfied: bool
    boundary: bool

    @staticmethod
    def of(name: str, required: float, actual: float) -> "ThresholdCheck":
        scale = max(1.0, abs(required), abs(actual))
        boundary = abs(actual - required) <= 1e-12 * scale
        return ThresholdCheck(name=name, required=required, actual=actual,
                              satisfied=actual >= required - 1e-12 * scale,
                              boundary=boundary)


@dataclass(frozen=True)
class SliceReport:
    """Stability data of the slice {t} x S^2."""

    t: float
    r: float            # slice radius h(t)
    H: float            # slice mean curvature h'/h
    lambda1: float      # first Laplacian eigenvalue, 2 (H^2 + k_tan) = 2/r^2
    jacobi_mu: tuple[float, ...]
    stable: bool        # mu_1 >= 0, equivalently k_tan >= k_rad
    monotone: bool      # H non-increasing at t, i.e. h'' h - h'^2 <= 0
    thresholds: dict[str, ThresholdCheck]


def slice_monotonicity(model, t: float) -> bool:
    """True when the slice mean curvature is non-increasing at t."""
    h, hp, hpp = model.eval(t)
    return hpp * h - hp * hp <= 1e-12 * max(1.0, abs(hpp * h), hp * hp)


def _slice_required_h2(model, r0: float) -> dict[str, ThresholdCheck] | None:
    """Model-specific slice-theorem requirements at radius r0, H^2 left out."""
    if model.kind == "dss":
        return {"h2_min": (model.m / (2.0 * r0**3) - model.c)}
    if model.kind == "rn":
        return {"h2_min": (model.m - 2.0 * model.q**2 / r0) / (2.0 * r0**3)}
    if model.kind == "space_form":
        return {"h2_min": -model.c}
    return None


def thm_slice_hypothesis(model, r0: float, H: float) -> dict[str, ThresholdCheck]:
    """Check the CMC-stability hypothesis of the slice theorems at radius r0.

    For the charged model the charge gate 2q <= sqrt(15) m / 4 is reported
    alongside the mean-curvature bound; the gate is exactly what makes the
    radial threshold monotone, so the supremum sits at r0.
    """
    required = _slice_required_h2(model, r0)
    if required is None:
        raise InvalidParameters(f"no slice theorem for model kind {model.kind!r}")
    if hasattr(model, "s0") and not (model.s0 <= r0 <= getattr(model, "s1", math.inf)):
        raise OutOfDomain(f"r0 = {r0} outside the radial domain")
    checks = {name: ThresholdCheck.of(name, req, H * H)
              for name, req in required.items()}
    if model.kind == "rn":
        gate = ThresholdCheck.of("charge_gate",
                                 required=2.0 * model.q,
                                 actual=math.sqrt(15.0) * model.m / 4.0)
        checks["charge_gate"] = gate
    return checks


def slice_report(model, t: float, l_max: int = 8) -> SliceReport:
    """Jacobi spectrum and threshold checks for the slice at parameter t."""
    if l_max < 1:
        raise InvalidParameters(f"l_max must be >= 1, got {l_max}")
    st = curvature_state(model, t)
    h = st.h
    H = st.hp / h
    h2 = H * H
    mu = tuple((l * (l + 1)) / (h * h) - 2.0 * st.k_rad - 2.0 * h2
               for l in range(1, l_max + 1))
    checks = {"h2_vs_minus_krad": ThresholdCheck.of("h2_vs_minus_krad", -st.k_rad, h2)}
    model_req = _slice_required_h2(model, h)
    if model_req is not None:
        for name, req in model_req.items():
            checks[name] = ThresholdCheck.of(name, req, h2)
        if model.kind == "rn":
            checks["charge_gate"] = ThresholdCheck.of(
                "charge_gate", 2.0 * model.q, math.sqrt(15.0) * model.m / 4.0)
    return SliceReport(
        t=t, r=h, H=H,
        lambda1=2.0 * (h2 + st.k_tan),
        jacobi_mu=mu,
        stable=mu[0] >= -1e-12 * max(1.0, abs(mu[0])),
        monotone=slice_monotonicity(model, t),
        thresholds=checks,
    )


def slice_threshold_radius_closed(model) -> float:
    """Closed-form radius where the slice H^2 meets the theorem threshold."""
    if model.kind == "dss":
        return 1.5 * model.m  # the cosmological term cancels identically
    if model.kind == "rn":
        m, q = model.m, model.q
        disc = 9.0 * m * m - 32.0 * q * q
        if disc < 0.0:
            raise HypothesisViolated("no crossing: every slice satisfies the bound")
        return 0.25 * (3.0 * m + math.sqrt(disc))
    raise InvalidParameters(f"no slice theorem for model kind {model.kind!r}")


def slice_threshold_radius(model, rtol: float = 1e-14) -> float:
    """Radius where slice H^2 crosses the theorem threshold, by bisection.

    The margin g(r) = phi(r)/r^2 - required(r) is negative just outside the
    horizon and positive at the far end of the domain; its root is bracketed
    and refined.  Raises HypothesisViolated when the domain cap is reached
    before any crossing.
    """
    if model.kind not in ("dss", "rn"):
        raise InvalidParameters(f"no slice theorem for model kind {model.kind!r}")

    def margin(r: float) -> float:
        h2 = model.phi(r) / (r * r)
        return h2 - _slice_required_h2(model, r)["h2_min"]

    lo = model.s0 * (1.0 + 1e-9)
    hi = model.r_hi * (1.0 - 1e-12)
    if margin(lo) >= 0.0:
        raise HypothesisViolated("no crossing: the bound holds from the horizon on")
    if margin(hi) <= 0.0:
        raise HypothesisViolated(
            f"no crossing below the domain cap r = {model.r_hi:.6g}")
    # plain bisection: the margin is cheap and the bracket is guaranteed
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if margin(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# interval suprema for the curvature-ordering theorem


@dataclass(frozen=True)
class Supremum:
    """A supremum over a parameter interval and where it was found.

    attained is False when the scan maximum sits at the cap of an unbounded
    domain, i.e. the reported value is only a lower bound for the true sup.
    """

    value: float
    t_at: float
    attained: bool

    def __float__(self) -> float:
        return self.value


def _sup_with_attainment(model, f, a: float, b: float, n: int = 512) -> Supremum:
    value, t_at = scan_max(f, a, b, n=n)
    t1 = model.t_domain()[1]
    at_cap = (getattr(model, "unbounded", False)
              and abs(b - t1) <= 1e-9 * max(1.0, t1)
              and b - t_at <= (b - a) / (n - 1))
    return Supremum(value=value, t_at=t_at, attained=not at_cap)


def stab_main_threshold(model, t_interval, case: str, n: int = 512) -> Supremum:
    """Mean-curvature threshold of the curvature-ordering stability theorem.

    case "i"  requires k_tan >= k_rad on the interval; threshold sup(-k_rad).
    case "ii" requires k_rad >= k_tan; threshold sup(-k_tan).
    """
    a, b = _interval(model, t_interval)
    if case not in ("i", "ii"):
        raise InvalidParameters(f"case must be 'i' or 'ii', got {case!r}")

    def gap(t: float) -> float:
        st = curvature_state(model, t)
        d = st.k_tan - st.k_rad
        return d if case == "i" else -d

    worst, t_bad = scan_min(gap, a, b, n=n)
    if worst < -1e-12:
        raise HypothesisViolated(
            f"curvature ordering for case {case} fails at t = {t_bad:.6g} "
            f"(gap {worst:.3e})")

    which = "k_rad" if case == "i" else "k_tan"

    def target(t: float) -> float:
        st = curvature_state(model, t)
        return -getattr(st, which)

    return _sup_with_attainment(model, target, a, b, n=n)


# ---------------------------------------------------------------------------
# the stability polynomial and its window


def _check_y(y):
    # scalar or ndarray; values are clipped after an out-of-range check
    y = np.asarray(y, dtype=float)
    if np.any(y < -1e-12) or np.any(y > 1.0 + 1e-12):
        raise InvalidParameters("y = 1 - nu^2 must lie in [0, 1]")
    y = np.clip(y, 0.0, 1.0)
    return y if y.ndim else float(y)


def p_poly(eps: float, y):
    """p(y) = 4 (1 + eps) - 2 eps y - eps^2 y^2 on y in [0, 1] (y may be
    an array)."""
    y = _check_y(y)
    return 4.0 * (1.0 + eps) - 2.0 * eps * y - eps * eps * y * y


def p_a_poly(eps: float, h_a: float, y):
    """p_a(y) = 4 (H_a^2 + 1 + eps) - 2 eps y - eps^2 y^2, H_a = H/a."""
    y = _check_y(y)
    return 4.0 * (h_a * h_a + 1.0 + eps) - 2.0 * eps * y - eps * eps * y * y


def _window_by_roots(eps: float) -> bool:
    # p is concave in y (leading coefficient -eps^2), p(0) = 4(1 + eps)
    if eps == 0.0:
        return True
    disc = 5.0 + 4.0 * eps
    if disc < 0.0:
        return False  # no real roots and p(0) < 0 for eps < -5/4
    root = math.sqrt(disc)
    if eps > 0.0:
        # positive root y+ = (root - 1)/eps must clear y = 1
        return (root - 1.0) / eps >= 1.0
    # eps < 0: p(0) >= 0 needs eps >= -1; then the smaller root is <= 0
    # and the larger root (1 - root)/|eps| ... p(1) = (1+eps)(4 - ... ) --
    # nonnegativity on [0,1] reduces to both endpoint values:
    return 4.0 * (1.0 + eps) >= 0.0 and p_poly(eps, 1.0) >= 0.0


def _window_by_scan(eps: float, n: int = 10_001) -> bool:
    y = np.linspace(0.0, 1.0, n)
    vals = 4.0 * (1.0 + eps) - 2.0 * eps * y - eps * eps * y * y
    return bool(np.min(vals) >= -1e-9)


def eps_window_check(eps: float) -> bool:
    """True when p(.; eps) >= 0 on all of [0, 1], i.e. eps in [-1, 1+sqrt(5)].

    Determined from the root formulas and cross-checked against a dense grid
    scan; the two routes must agree away from the window boundary.
    """
    by_roots = _window_by_roots(eps)
    by_scan = _window_by_scan(eps)
    if by_roots != by_scan:
        near_edge = min(abs(eps - EPS_WINDOW_LO), abs(eps - EPS_WINDOW_HI)) < 1e-8
        if not near_edge:
            raise ArithmeticError(
                f"window check disagreement at eps = {eps}: "
                f"roots say {by_roots}, scan says {by_scan}")
    return by_roots


def h2_threshold(eps: float, a: float) -> float:
    """Minimal H^2 guaranteeing p_a > 0 on [0, 1] when eps is outside the window.

    Three regimes (thresholds scale with a^2):

        eps > 1 + sqrt(5):   a^2 (eps^2 - 2 eps - 4)/4       binding at y = 1
        -2 <= eps < -1:      a^2 (|eps| - 1)                  binding at y = 0
        eps < -2:            a^2 (eps^2 + 2 |eps| - 4)/4      binding at y = 1
    """
    if a == 0.0:
        raise InvalidParameters("a must be nonzero (flat shape operator)")
    a2 = a * a
    if eps > EPS_WINDOW_HI:
        return a2 * (eps * eps - 2.0 * eps - 4.0) / 4.0
    if eps < EPS_WINDOW_LO:
        if eps >= -2.0:
            return a2 * (-eps - 1.0)
        return a2 * (eps * eps - 2.0 * eps - 4.0) / 4.0
    raise InvalidParameters(
        f"eps = {eps} lies in the stable window [{EPS_WINDOW_LO}, "
        f"{EPS_WINDOW_HI:.6f}]; no threshold is needed")


@dataclass(frozen=True)
class StabilityWindow:
    """Outcome of the window test in the delta = eps a^2 parametrization."""

    regime: str              # "window" or "threshold"
    case_id: str | None      # "i", "ii", "iii" per h2_threshold regime order
    h2_min: float            # 0.0 inside the window
    a: float
    eps: float
    delta: float


def delta_thresholds(delta: float, a: float) -> StabilityWindow:
    """Window test and threshold in terms of delta = eps a^2.

    Reduces to h2_threshold through eps = delta / a^2, so the two
    parametrizations cannot drift apart.
    """
    if a == 0.0:
        raise InvalidParameters("a must be nonzero (flat shape operator)")
    eps = delta / (a * a)
    if eps_window_check(eps):
        return StabilityWindow(regime="window", case_id=None, h2_min=0.0,
                               a=a, eps=eps, delta=delta)
    if eps > EPS_WINDOW_HI:
        case = "i"
    elif eps >= -2.0:
        case = "ii"
    else:
        case = "iii"
    return StabilityWindow(regime="threshold", case_id=case,
                           h2_min=h2_threshold(eps, a), a=a, eps=eps, delta=delta)


# ---------------------------------------------------------------------------
# the warped-product stability constant c0


@dataclass(frozen=True)
class C0Result:
    case_id: str   # "a", "b" or "c": the regime attaining the supremum
    value: float
    t_at: float


def _c0_pointwise(model, t: float) -> tuple[float, str]:
    """Pointwise mean-curvature threshold and its curvature regime.

    Regimes by the ratio rho = k_rad/k_tan (k_tan > 0 required):
        a: rho >= 2 + sqrt(5),   threshold k_tan (rho^2 - 4 rho - 1)/4
        b: -1 <= rho < 0,        threshold -k_rad
        c: rho <= -1,            threshold k_tan (x^2 + 4 x - 1)/4, x = -rho
    Window points (0 <= rho < 2 + sqrt(5) ... up to the boundary) need none.
    """
    st = curvature_state(model, t)
    kt, kr = st.k_tan, st.k_rad
    if kt <= 0.0:
        raise HypothesisViolated(
            f"tangential curvature must be positive, got {kt:.3e} at t = {t:.6g}")
    rho = kr / kt
    eps = rho - 1.0
    if eps_window_check(eps):
        return 0.0, "window"
    if rho >= 2.0 + math.sqrt(5.0):
        case, value = "a", 0.25 * kt * (rho * rho - 4.0 * rho - 1.0)
    elif rho >= -1.0:
        case, value = "b", -kr
    else:
        x = -rho
        case, value = "c", 0.25 * kt * (x * x + 4.0 * x - 1.0)
    # the case formulas are reparametrizations of h2_threshold(eps, sqrt(kt))
    alt = h2_threshold(eps, math.sqrt(kt))
    if abs(alt - value) > 1e-10 * max(1.0, abs(value)):
        raise ArithmeticError(
            f"case formula and threshold disagree at t = {t}: {value} vs {alt}")
    return value, case


def c0(model, t_interval, n: int = 1024) -> C0Result:
    """Stability constant: sup over the interval of the pointwise threshold.

    Window points contribute zero; intervals mixing several regimes are
    handled by the pointwise supremum.  Raises HypothesisViolated when the
    tangential curvature is not positive somewhere, or when no point of the
    interval falls in a threshold regime.
    """
    a, b = _interval(model, t_interval)

    def value_only(t: float) -> float:
        return _c0_pointwise(model, t)[0]

    value, t_at = scan_max(value_only, a, b, n=n)
    _, case = _c0_pointwise(model, t_at)
    if case == "window":
        raise HypothesisViolated(
            "every point of the interval lies in the stable window; "
            "no threshold constant applies")
    return C0Result(case_id=case, value=value, t_at=t_at)


# ---------------------------------------------------------------------------
# second-variation quadratic forms


@dataclass(frozen=True)
class QSumInput:
    """Inputs of the codimension-1 second-variation sum.

    H: mean curvature of the CMC surface; a, eps: ambient shape-operator
    parameters; nu: normal tilt; x_norm2: |X|^2 of the test section.
    """

    H: float
    a: float
    eps: float
    nu: float
    x_norm2: float


def qsum(inp: QSumInput) -> float:
    """Second-variation curvature sum, factored form.

    Computed both factored, (4 H^2 + a^2 p(eps, y)) |X|^2 with y = 1 - nu^2,
    and expanded, (4 H^2 + 6 a^2 + 4 eps a^2)|X|^2 - a^2 (2 + 2 eps y +
    eps^2 y^2)|X|^2; the two must agree to 1e-13 relative to the term scale.
    """
    if inp.x_norm2 < 0.0:
        raise InvalidParameters(f"|X|^2 must be nonnegative, got {inp.x_norm2}")
    if abs(inp.nu) > 1.0 + 1e-12:
        raise InvalidParameters(f"nu must lie in [-1, 1], got {inp.nu}")
    nu = min(max(inp.nu, -1.0), 1.0)
    y = 1.0 - nu * nu
    a2, eps, x = inp.a * inp.a, inp.eps, inp.x_norm2
    h2 = inp.H * inp.H
    factored = (4.0 * h2 + a2 * p_poly(eps, y)) * x
    expanded = (4.0 * h2 + 6.0 * a2 + 4.0 * eps * a2) * x \
        - a2 * (2.0 + 2.0 * eps * y + eps * eps * y * y) * x
    scale = (4.0 * h2 + a2 * (6.0 + 6.0 * abs(eps) + eps * eps)) * x + 1e-300
    if abs(factored - expanded) > 1e-13 * scale:
        raise ArithmeticError(
            f"factored/expanded disagreement: {factored} vs {expanded}")
    return factored


def codim1_ii_terms(a: float, eps: float, nu: float, x_norm2: float) -> float:
    """Second-fundamental-form sum of the codimension-1 warped embedding:
    a^2 (2 + 2 eps y + eps^2 y^2)|X|^2 with y = 1 - nu^2."""
    y = 1.0 - min(max(nu, -1.0), 1.0) ** 2
    return a * a * (2.0 + 2.0 * eps * y + eps * eps * y * y) * x_norm2


def qsum_general(H: float, scal: float, x_norm2: float, ii_terms: float) -> float:
    """General-embedding curvature sum (4 H^2 + 6 scal)|X|^2 - ii_terms."""
    if x_norm2 < 0.0:
        raise InvalidParameters(f"|X|^2 must be nonnegative, got {x_norm2}")
    return (4.0 * H * H + 6.0 * scal) * x_norm2 - ii_terms


# ---------------------------------------------------------------------------
# thresholds independent of the curvature ordering


@dataclass(frozen=True)
class GeneralThresholds:
    """Two interval thresholds for H^2; nonpositive raw values mean the bound
    is vacuous (every CMC surface with nonzero H already clears it)."""

    mean_shape: float          # -3 inf(scal - (3/4)|Hvec|^2), clamped at 0
    mean_shape_vacuous: bool
    ricci: float               # -(1/2) inf of the smallest Ricci eigenvalue
    ricci_vacuous: bool


def general_threshold(model, t_interval, n: int = 512) -> GeneralThresholds:
    """Evaluate both interval stability thresholds.

    The first uses the mean shape vector of the flat embedding (requires
    k_tan of one sign), the second only intrinsic Ricci curvature.
    """
    a, b = _interval(model, t_interval)

    def shape_gap(t: float) -> float:
        st = curvature_state(model, t)
        hn = _embedding.mean_vector_norm(model, t)
        return scalar_curvature(st) - 0.75 * hn * hn

    raw_shape = -3.0 * scan_min(shape_gap, a, b, n=n)[0]
    raw_ricci = -0.5 * ricci_infimum(model, (a, b), n=n)
    return GeneralThresholds(
        mean_shape=max(raw_shape, 0.0),
        mean_shape_vacuous=raw_shape <= 0.0,
        ricci=max(raw_ricci, 0.0),
        ricci_vacuous=raw_ricci <= 0.0,
    )


# ---------------------------------------------------------------------------
# integral identities on slices


@dataclass(frozen=True)
class SliceIntegrals:
    """Quadrature values of three slice integrals and their verdicts."""

    area: float
    h2_plus_ktan: float       # integral of H^2 + k_tan, exactly 4 pi on slices
    h2x2_plus_ricci: float    # integral of 2 H^2 + Ric(N,N), <= 8 pi for genus 0
    gauss_total: float        # integral of the slice Gauss curvature 1/h^2
    equals_4pi: bool
    below_8pi: bool
    gauss_4pi: bool


def slice_integral_checks(model, t: float, order: int = 16,
                          tol: float = 1e-8) -> SliceIntegrals:
    """Evaluate the slice integral identities at parameter t.

    All three integrands are constant on a slice, so these are sharp tests
    of the sphere rule's weight normalization.
    """
    st = curvature_state(model, t)
    h2 = (st.hp / st.h) ** 2
    four_pi = 4.0 * math.pi

    area = integrate_slice(lambda p1, p2: np.ones_like(p1), model, t, order=order)
    v1 = integrate_slice(lambda p1, p2: np.full_like(p1, h2 + st.k_tan),
                         model, t, order=order)
    ric = ricci_normal(st, -1.0)
    v2 = integrate_slice(lambda p1, p2: np.full_like(p1, 2.0 * h2 + ric),
                         model, t, order=order)
    v3 = integrate_slice(lambda p1, p2: np.full_like(p1, 1.0 / (st.h * st.h)),
                         model, t, order=order)
    return SliceIntegrals(
        area=area,
        h2_plus_ktan=v1,
        h2x2_plus_ricci=v2,
        gauss_total=v3,
        equals_4pi=abs(v1 - four_pi) <= tol * four_pi,
        below_8pi=v2 <= 2.0 * four_pi * (1.0 + tol),
        gauss_4pi=abs(v3 - four_pi) <= tol * four_pi,
    )
