"""Stability thresholds: slice spectra, window polynomial, c0, Q-sums."""

import math

import numpy as np
import pytest

from warpstab import stability, warping
from warpstab.curvature import curvature_state
from warpstab.errors import HypothesisViolated, InvalidParameters

SQRT5 = math.sqrt(5.0)


def _dss(m=1.0, c=0.0, cap=40.0):
    return warping.DeSitterSchwarzschild(m, c, cap=cap)


def _rn(m=2.0, q=0.5, cap=40.0):
    return warping.ReissnerNordstrom(m, q, cap=cap)


# ---------------------------------------------------------------------------
# slice spectra


def test_lambda1_identity_everywhere():
    # 2 (H^2 + k_tan) collapses to 2/h^2 through the first integral
    models = [_dss(), _rn(), warping.SpaceForm(1.0),
              warping.ellipsoid_model(0.7)]
    for model in models:
        t0, t1 = model.t_domain()
        for t in np.linspace(t0 + 1e-3, min(t1, 6.0) - 1e-3, 17):
            rep = stability.slice_report(model, t)
            assert math.isclose(rep.lambda1, 2.0 / rep.r**2, rel_tol=1e-11)


def test_slice_jacobi_frozen_dss():
    model = _dss()
    t = model.t_of_r(2.0)
    rep = stability.slice_report(model, t)
    assert math.isclose(rep.H**2, 0.125, rel_tol=1e-12)
    # mu_1 = 2 (k_tan - k_rad) = 2 (1/8 + 1/16)
    assert math.isclose(rep.jacobi_mu[0], 0.375, rel_tol=1e-11)
    assert rep.stable


def test_slice_jacobi_mode_formula():
    model = _rn()
    t = model.t_of_r(3.0)
    rep = stability.slice_report(model, t, l_max=5)
    st = curvature_state(model, t)
    assert len(rep.jacobi_mu) == 5
    for k, mu in enumerate(rep.jacobi_mu, start=1):
        want = k * (k + 1) / st.h**2 - 2.0 * st.k_rad - 2.0 * rep.H**2
        assert math.isclose(mu, want, rel_tol=1e-12)


def test_slice_neutral_on_round_sphere():
    # space forms have k_tan = k_rad, so mu_1 = 0: marginally stable
    model = warping.SpaceForm(1.0)
    rep = stability.slice_report(model, math.pi / 4.0)
    assert abs(rep.jacobi_mu[0]) < 1e-12
    assert rep.stable
    assert rep.monotone


def test_slice_monotonicity_flips_at_crossing():
    # H decreases outward only beyond the threshold radius 3m/2
    model = _dss()
    assert not stability.slice_monotonicity(model, model.t_of_r(1.2))
    assert stability.slice_monotonicity(model, model.t_of_r(1.6))


def test_thm_slice_hypothesis_dss():
    model = _dss()
    h2 = lambda r: (1.0 - 1.0 / r) / r**2
    checks = stability.thm_slice_hypothesis(model, 2.0, math.sqrt(h2(2.0)))
    assert checks["h2_min"].satisfied
    checks = stability.thm_slice_hypothesis(model, 1.2, math.sqrt(h2(1.2)))
    assert not checks["h2_min"].satisfied


def test_thm_slice_hypothesis_rn_gate():
    checks = stability.thm_slice_hypothesis(_rn(), 3.0, 0.2)
    gate = checks["charge_gate"]
    # 2q = 1 against sqrt(15) m / 4 ~ 1.936
    assert math.isclose(gate.required, 1.0, rel_tol=1e-15)
    assert math.isclose(gate.actual, math.sqrt(15.0) / 2.0, rel_tol=1e-15)
    assert gate.satisfied


# ---------------------------------------------------------------------------
# threshold radius


def test_threshold_radius_dss_family():
    for c in (0.0, -1.0, 0.05):
        model = warping.DeSitterSchwarzschild(1.0, c)
        r = stability.slice_threshold_radius(model)
        assert abs(r - 1.5) <= 1e-9, c
        assert math.isclose(stability.slice_threshold_radius_closed(model),
                            1.5, rel_tol=1e-15)


def test_threshold_radius_scales_with_mass():
    model = warping.DeSitterSchwarzschild(2.0, 0.0)
    assert abs(stability.slice_threshold_radius(model) - 3.0) <= 1e-9


def test_threshold_radius_rn():
    model = _rn()
    want = (6.0 + math.sqrt(36.0 - 8.0)) / 4.0
    assert abs(stability.slice_threshold_radius(model) - want) <= 1e-9
    assert math.isclose(stability.slice_threshold_radius_closed(model),
                        want, rel_tol=1e-14)


# ---------------------------------------------------------------------------
# ordering-case thresholds


def test_stab_main_threshold_case_i_dss():
    model = _dss()
    iv = (model.t_of_r(1.2), model.t_of_r(5.0))
    sup = stability.stab_main_threshold(model, iv, case="i")
    # sup(-k_rad) = m/(2 r^3) at the inner radius
    assert math.isclose(float(sup), 0.5 / 1.2**3, rel_tol=1e-10)
    assert sup.attained


def test_stab_main_threshold_case_ii_needs_ordering():
    model = _dss()
    iv = (model.t_of_r(1.2), model.t_of_r(5.0))
    with pytest.raises(HypothesisViolated):
        stability.stab_main_threshold(model, iv, case="ii")


def test_stab_main_threshold_case_ii_ellipsoid():
    # oblate profile has k_rad >= k_tan throughout: ordering case ii
    model = warping.ellipsoid_model(0.7)
    t0, t1 = model.t_domain()
    iv = (t0 + 1e-6, t1 - 1e-6)
    sup = stability.stab_main_threshold(model, iv, case="ii")
    # -k_tan < 0 everywhere here, so the bound is vacuous but well-defined
    assert float(sup) < 0.0
    with pytest.raises(HypothesisViolated):
        stability.stab_main_threshold(model, iv, case="i")


# ---------------------------------------------------------------------------
# window polynomial


def test_p_poly_boundary_minima():
    ys = np.linspace(0.0, 1.0, 10_001)
    lo = stability.p_poly(-1.0, ys).min()
    hi = stability.p_poly(1.0 + SQRT5, ys).min()
    assert abs(lo) <= 1e-9
    assert abs(hi) <= 1e-9


def test_p_poly_inside_window_positive():
    ys = np.linspace(0.0, 1.0, 2001)
    for eps in (-0.99, -0.5, 0.0, 1.0, 3.0, 1.0 + SQRT5 - 1e-3):
        assert stability.p_poly(eps, ys).min() > 0.0, eps


def test_eps_window_check_against_scan():
    rng = np.random.default_rng(1234)
    ys = np.linspace(0.0, 1.0, 4001)
    for eps in rng.uniform(-5.0, 5.0, size=1000):
        verdict = stability.eps_window_check(float(eps))
        scan_min = stability.p_poly(float(eps), ys).min()
        if abs(scan_min) < 1e-9:
            continue  # too close to the boundary for the grid to decide
        assert verdict == (scan_min > 0.0), eps


def test_p_a_poly_shifts_by_h2():
    # p_a(y) = p(y) + 4 H^2/a^2
    rng = np.random.default_rng(5)
    for _ in range(100):
        eps = rng.uniform(-4.0, 4.0)
        h_a = rng.uniform(0.0, 3.0)
        y = rng.uniform(0.0, 1.0)
        lhs = stability.p_a_poly(eps, h_a, y)
        rhs = stability.p_poly(eps, y) + 4.0 * h_a * h_a
        assert math.isclose(lhs, rhs, rel_tol=0, abs_tol=1e-12)


# ---------------------------------------------------------------------------
# mean-curvature thresholds


def test_h2_threshold_frozen_examples():
    assert math.isclose(stability.h2_threshold(4.0, 1.0), 1.0, rel_tol=1e-14)
    assert math.isclose(stability.h2_threshold(-1.5, 2.0), 2.0, rel_tol=1e-14)
    assert math.isclose(stability.h2_threshold(-3.0, 1.0), 2.75, rel_tol=1e-14)


def test_h2_threshold_rejects_window_eps():
    with pytest.raises(InvalidParameters):
        stability.h2_threshold(0.5, 1.0)
    with pytest.raises(InvalidParameters):
        stability.h2_threshold(0.0, 1.0)


def _h2_scan_oracle(eps, a, n_y=2001, iters=60):
    """Bisect the smallest H^2 with min_y p_a >= 0 on a dense y-grid."""
    ys = np.linspace(0.0, 1.0, n_y)

    def ok(h2):
        h_a2 = h2 / (a * a)
        vals = 4.0 * (h_a2 + 1.0 + eps) - 2.0 * eps * ys - eps * eps * ys**2
        return vals.min() >= 0.0

    lo, hi = 0.0, a * a * (eps * eps + 2.0 * abs(eps) + 5.0)
    assert ok(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def test_h2_threshold_against_scan_oracle():
    rng = np.random.default_rng(777)
    count = 0
    while count < 200:
        eps = rng.uniform(-5.0, 8.0)
        if -1.001 <= eps <= 1.0 + SQRT5 + 0.001:
            continue
        a = rng.uniform(0.3, 3.0)
        want = _h2_scan_oracle(eps, a)
        got = stability.h2_threshold(eps, a)
        assert math.isclose(got, want, rel_tol=0,
                            abs_tol=1e-6 * max(1.0, want)), (eps, a)
        count += 1


def test_delta_thresholds_consistency():
    rng = np.random.default_rng(99)
    for _ in range(200):
        eps = rng.choice([rng.uniform(-5.0, -1.01), rng.uniform(3.3, 8.0)])
        a = rng.uniform(0.3, 3.0)
        delta = eps * a * a
        win = stability.delta_thresholds(delta, a)
        direct = stability.h2_threshold(win.eps, a)
        assert win.h2_min == direct
        # and the reparametrized eps stays within an ulp of the original
        assert math.isclose(win.h2_min, stability.h2_threshold(eps, a),
                            rel_tol=1e-12)


def test_delta_threshold_case_ids():
    assert stability.delta_thresholds(4.0, 1.0).case_id == "i"
    assert stability.delta_thresholds(-1.5 * 4.0, 2.0).case_id == "ii"
    assert stability.delta_thresholds(-3.0, 1.0).case_id == "iii"


# ---------------------------------------------------------------------------
# c0


def test_c0_case_b_dss():
    model = _dss()
    iv = (model.t_of_r(1.2), model.t_of_r(5.0))
    res = stability.c0(model, iv)
    assert res.case_id == "b"
    # -k_rad = m/(2 r^3) maximal at the inner radius
    assert math.isclose(res.value, 0.5 / 1.2**3, rel_tol=1e-9)


def test_c0_hyperboloid_unit_b():
    model = warping.hyperboloid_model(1.0, s_max=3.0)
    t0, t1 = model.t_domain()
    res = stability.c0(model, (t0 + 1e-9, t1 - 1e-9))
    assert math.isclose(res.value, 1.0, rel_tol=1e-8)


def test_c0_hyperboloid_case_c():
    b = 0.8
    model = warping.hyperboloid_model(b, s_max=3.0)
    t0, t1 = model.t_domain()
    res = stability.c0(model, (t0 + 1e-9, t1 - 1e-9))
    assert res.case_id == "c"
    # waist: k_tan = 1 (radius-1 neck), k_rad = -1/b^2, so x = 1/b^2
    x = 1.0 / (b * b)
    want = 0.25 * (x * x + 4.0 * x - 1.0)
    assert math.isclose(res.value, want, rel_tol=1e-8)


def test_c0_ellipsoid_small_b_case_a():
    b = 0.4
    model = warping.ellipsoid_model(b)
    t0, t1 = model.t_domain()
    res = stability.c0(model, (t0 + 1e-9, t1 - 1e-9))
    assert res.case_id == "a"
    # equator: k_tan = 1, rho = 1/b^2
    rho = 1.0 / (b * b)
    want = 0.25 * (rho * rho - 4.0 * rho - 1.0)
    assert math.isclose(res.value, want, rel_tol=1e-8)


def test_c0_window_everywhere_rejected():
    model = warping.ellipsoid_model(0.7)  # eps range [0, 1/b^2 - 1], in-window
    t0, t1 = model.t_domain()
    with pytest.raises(HypothesisViolated):
        stability.c0(model, (t0 + 1e-9, t1 - 1e-9))


def test_c0_constant_ratio_fixture():
    # phi = 1 - h^(2 rho) gives k_rad/k_tan = rho exactly; rho = 3 + sqrt(5)
    # puts eps = 2 + sqrt(5) strictly above the window
    rho = 3.0 + SQRT5
    model = warping.FirstIntegralModel(
        phi=lambda r: 1.0 - r ** (2.0 * rho),
        dphi=lambda r: -2.0 * rho * r ** (2.0 * rho - 1.0),
        d2phi=lambda r: -2.0 * rho * (2.0 * rho - 1.0) * r ** (2.0 * rho - 2.0),
        r_lo=0.2, r_hi=0.9,
    )
    iv = (model.t_of_r(0.25), model.t_of_r(0.85))
    st = curvature_state(model, iv[1])
    assert math.isclose(st.k_rad / st.k_tan, rho, rel_tol=1e-9)
    res = stability.c0(model, iv)
    assert res.case_id == "a"
    want = 0.25 * st.k_tan * (rho * rho - 4.0 * rho - 1.0)
    assert math.isclose(res.value, want, rel_tol=1e-8)


def test_c0_needs_positive_tangential_curvature():
    model = warping.SpaceForm(-1.0, cap=10.0)
    with pytest.raises(HypothesisViolated):
        stability.c0(model, (0.5, 2.0))


# ---------------------------------------------------------------------------
# Q-sums


def test_qsum_frozen_example():
    inp = stability.QSumInput(H=0.0, a=1.0, eps=0.0, nu=0.0, x_norm2=1.0)
    assert math.isclose(stability.qsum(inp), 4.0, rel_tol=1e-15)


def test_qsum_factored_equals_expanded():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        inp = stability.QSumInput(
            H=rng.uniform(0.0, 2.0),
            a=rng.uniform(-2.0, 2.0),
            eps=rng.uniform(-4.0, 4.0),
            nu=rng.uniform(-1.0, 1.0),
            x_norm2=rng.uniform(0.0, 3.0),
        )
        got = stability.qsum(inp)
        y = 1.0 - inp.nu**2
        expanded = ((4.0 * inp.H**2 + 6.0 * inp.a**2 + 4.0 * inp.eps * inp.a**2)
                    * inp.x_norm2
                    - inp.a**2 * (2.0 + 2.0 * inp.eps * y
                                  + inp.eps**2 * y * y) * inp.x_norm2)
        assert math.isclose(got, expanded, rel_tol=0,
                            abs_tol=1e-12 * max(1.0, abs(got)))


def test_qsum_general_reproduces_codim1():
    rng = np.random.default_rng(31)
    for _ in range(300):
        H = rng.uniform(0.0, 2.0)
        a = rng.uniform(0.2, 2.0)
        eps = rng.uniform(-4.0, 4.0)
        nu = rng.uniform(-1.0, 1.0)
        x = rng.uniform(0.0, 3.0)
        scal = (6.0 * a * a + 4.0 * eps * a * a) / 6.0
        ii = stability.codim1_ii_terms(a, eps, nu, x)
        got = stability.qsum_general(H, scal, x, ii)
        want = stability.qsum(stability.QSumInput(H, a, eps, nu, x))
        assert math.isclose(got, want, rel_tol=0,
                            abs_tol=1e-12 * max(1.0, abs(want)))


# ---------------------------------------------------------------------------
# interval thresholds from curvature data


def test_general_threshold_round_sphere_vacuous():
    model = warping.SpaceForm(1.0)
    gen = stability.general_threshold(model, (0.3, math.pi - 0.3))
    assert gen.mean_shape == 0.0 and gen.mean_shape_vacuous
    assert gen.ricci == 0.0 and gen.ricci_vacuous


def test_general_threshold_dss_slab():
    model = _dss()
    iv = (model.t_of_r(2.0), model.t_of_r(4.0))
    gen = stability.general_threshold(model, iv)
    assert math.isclose(gen.ricci, 0.0625, rel_tol=1e-9)
    assert not gen.ricci_vacuous
    # shape route: scal = 0 and |Hvec|^2 = k_tan/4 at the inner radius
    assert math.isclose(gen.mean_shape, 3.0 * 0.75 * 0.125 / 4.0, rel_tol=1e-8)


# ---------------------------------------------------------------------------
# slice integrals


def test_slice_integrals_exact_identities():
    for model in (_dss(), _rn(), warping.SpaceForm(1.0)):
        t1 = model.t_domain()[1]
        for t in np.linspace(0.4, min(t1 - 0.3, 5.0), 5):
            res = stability.slice_integral_checks(model, t)
            assert res.equals_4pi
            assert res.gauss_4pi
            assert res.below_8pi
            assert math.isclose(res.h2_plus_ktan, 4.0 * math.pi,
                                rel_tol=1e-10)
            assert math.isclose(res.gauss_total, 4.0 * math.pi, rel_tol=1e-10)


def test_slice_integral_area():
    model = _dss()
    t = model.t_of_r(3.0)
    res = stability.slice_integral_checks(model, t)
    assert math.isclose(res.area, 36.0 * math.pi, rel_tol=1e-10)
