"""Acceptance gate: one numbered pass/fail line per check.

Run with `pytest tests/test_acceptance.py -v -s` to see every line.
"""

import math
import time

import numpy as np

from warpstab import embedding, oracle, stability, warping
from warpstab.curvature import (radial_monotonicity_condition, curvature_state,
                                ricci_normal_forms)

SQRT5 = math.sqrt(5.0)


def _line(num, name, ok, detail=""):
    tail = f" ({detail})" if detail else ""
    print(f"[{num:02d}] {name}: {'PASS' if ok else 'FAIL'}{tail}")
    return ok


def _battery():
    dss0 = warping.DeSitterSchwarzschild(1.0, 0.0, cap=30.0)
    dss5 = warping.DeSitterSchwarzschild(1.0, 0.05)
    rn = warping.ReissnerNordstrom(2.0, 0.5, cap=30.0)
    return [
        ("space_form c=1", warping.SpaceForm(1.0), (0.3, math.pi - 0.3)),
        ("space_form c=0", warping.SpaceForm(0.0, cap=30.0), (0.5, 5.0)),
        ("space_form c=-1", warping.SpaceForm(-1.0, cap=30.0), (0.3, 3.0)),
        ("dss m=1 c=0", dss0, (dss0.t_of_r(1.2), dss0.t_of_r(5.0))),
        ("dss m=1 c=0.05", dss5, (dss5.t_of_r(1.2), dss5.t_of_r(3.6))),
        ("rn m=2 q=0.5", rn, (rn.t_of_r(2.0), rn.t_of_r(6.0))),
    ]


def test_01_slice_threshold_crossing_dss():
    t0 = time.perf_counter()
    worst = 0.0
    for c in (0.0, -1.0, 0.05):
        model = warping.DeSitterSchwarzschild(1.0, c)
        r = stability.slice_threshold_radius(model)
        worst = max(worst, abs(r - 1.5))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 1.0
    assert _line(1, "slice-threshold-crossing-dss", ok,
                 f"worst {worst:.2e}, {elapsed:.2f} s")


def test_02_slice_threshold_crossing_rn():
    model = warping.ReissnerNordstrom(2.0, 0.5)
    r = stability.slice_threshold_radius(model)
    want = (3.0 * 2.0 + math.sqrt(9.0 * 4.0 - 32.0 * 0.25)) / 4.0
    gate = stability.thm_slice_hypothesis(model, 3.0, 0.3)["charge_gate"]
    ok = abs(r - want) <= 1e-9 and gate.satisfied
    assert _line(2, "slice-threshold-crossing-rn", ok,
                 f"err {abs(r - want):.2e}, gate {gate.satisfied}")


def test_03_window_boundaries_and_membership():
    ys = np.linspace(0.0, 1.0, 10_000)
    lo = abs(float(stability.p_poly(-1.0, ys).min()))
    hi = abs(float(stability.p_poly(1.0 + SQRT5, ys).min()))
    rng = np.random.default_rng(314159)
    mismatches = 0
    for eps in rng.uniform(-5.0, 5.0, size=1000):
        scan_min = float(stability.p_poly(float(eps), ys).min())
        if abs(scan_min) < 1e-9:
            continue
        if stability.eps_window_check(float(eps)) != (scan_min > 0.0):
            mismatches += 1
    ok = lo <= 1e-9 and hi <= 1e-9 and mismatches == 0
    assert _line(3, "eps-window-boundaries", ok,
                 f"boundary residuals {lo:.1e}/{hi:.1e}, "
                 f"{mismatches} mismatches")


def _h2_scan_oracle(eps, a, n_y=4001, iters=60):
    ys = np.linspace(0.0, 1.0, n_y)

    def feasible(h2):
        return float(stability.p_a_poly(eps, math.sqrt(h2) / abs(a),
                                        ys).min()) >= 0.0

    lo, hi = 0.0, a * a * (eps * eps + 2.0 * abs(eps) + 5.0)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def test_04_threshold_formula_against_scan():
    rng = np.random.default_rng(2718)
    worst = 0.0
    worst_delta = 0.0
    count = 0
    while count < 200:
        eps = float(rng.uniform(-5.0, 8.0))
        if -1.001 <= eps <= 1.0 + SQRT5 + 0.001:
            continue
        a = float(rng.uniform(0.3, 3.0))
        got = stability.h2_threshold(eps, a)
        want = _h2_scan_oracle(eps, a)
        worst = max(worst, abs(got - want) / max(1.0, want))
        win = stability.delta_thresholds(eps * a * a, a)
        worst_delta = max(worst_delta,
                          abs(win.h2_min - got) / max(1.0, got))
        count += 1
    ok = worst <= 1e-6 and worst_delta <= 1e-12
    assert _line(4, "h2-threshold-vs-scan-oracle", ok,
                 f"scan {worst:.2e}, delta-form {worst_delta:.2e}")


def test_05_fd_oracle_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    all_pass = True
    for label, model, iv in _battery():
        rep = oracle.verify_model(model, iv, shape=(20, 10), tol=1e-6)
        worst = max(worst, max(rep.errors.values()))
        all_pass = all_pass and rep.passed
    elapsed = time.perf_counter() - t0
    ok = all_pass and elapsed < 10.0
    assert _line(5, "fd-oracle-equivalence", ok,
                 f"worst {worst:.2e}, {elapsed:.2f} s")


def test_06_embedding_verification():
    worst_form = 0.0
    worst_rel = 0.0
    for label, model, iv in _battery():
        st = curvature_state(model, 0.5 * (iv[0] + iv[1]))
        if st.k_tan <= 1e-10:
            continue
        emb = embedding.build_embedding(model, iv)
        worst_rel = max(worst_rel, emb.relation_residual())
        for t in np.linspace(iv[0] + 0.05 * (iv[1] - iv[0]),
                             iv[1] - 0.05 * (iv[1] - iv[0]), 5):
            sf = embedding.second_form_closed(model, t)
            closed = np.diag([sf.a * (1.0 + sf.eps), sf.a, sf.a])
            for phi1 in (0.7, 1.9):
                num = embedding.second_form_numeric(emb, t, phi1)
                err = float(np.max(np.abs(num - closed)))
                worst_form = max(worst_form, err / max(1.0, abs(sf.a)))
    ok = worst_form <= 1e-6 and worst_rel <= 1e-10
    assert _line(6, "embedding-second-form", ok,
                 f"form {worst_form:.2e}, relation {worst_rel:.2e}")


def test_07_exact_slice_integrals():
    worst_area_form = 0.0
    worst_gauss = 0.0
    for label, model, iv in _battery():
        for t in np.linspace(iv[0], iv[1], 5):
            res = stability.slice_integral_checks(model, t, order=16)
            worst_area_form = max(worst_area_form,
                              abs(res.h2_plus_ktan - 4.0 * math.pi))
            worst_gauss = max(worst_gauss,
                              abs(res.gauss_total - 4.0 * math.pi))
    ok = worst_area_form <= 1e-8 and worst_gauss <= 1e-8
    assert _line(7, "slice-integral-identities", ok,
                 f"area-form {worst_area_form:.2e}, gauss {worst_gauss:.2e}")


def test_08_ode_first_integral_fidelity():
    worst_drift = 0.0
    worst_round = 0.0
    for model in (warping.DeSitterSchwarzschild(1.0, 0.0, cap=60.0),
                  warping.ReissnerNordstrom(2.0, 0.5, cap=60.0)):
        traj = warping.integrate_h(model, 10.0, step=1e-3)
        worst_drift = max(worst_drift, traj.residual_max)
        for r in np.linspace(model.s0 * 1.02, 20.0, 25):
            h, _, _ = model.eval(model.t_of_r(r))
            worst_round = max(worst_round, abs(h - r) / r)
    ok = worst_drift <= 1e-10 and worst_round <= 1e-8
    assert _line(8, "ode-first-integral", ok,
                 f"drift {worst_drift:.2e}, roundtrip {worst_round:.2e}")


def test_09_structural_identities():
    rng = np.random.default_rng(60902)
    worst = {"lambda1": 0.0, "ricci": 0.0, "gauss": 0.0, "qsum": 0.0}

    battery = _battery()
    for k in range(1000):
        label, model, iv = battery[k % len(battery)]
        t = float(rng.uniform(iv[0], iv[1]))
        st = curvature_state(model, t)
        lam = 2.0 * ((st.hp / st.h) ** 2 + st.k_tan)
        worst["lambda1"] = max(worst["lambda1"],
                               abs(lam - 2.0 / st.h**2) / (2.0 / st.h**2))
        nu = float(rng.uniform(-1.0, 1.0))
        r1, r2 = ricci_normal_forms(st, nu)
        worst["ricci"] = max(worst["ricci"],
                             abs(r1 - r2) / max(1.0, abs(r1)))
        if st.k_tan > 1e-10:
            sf = embedding.second_form_closed(model, t)
            lhs = 2.0 * (st.k_tan + 2.0 * st.k_rad)
            rhs = (6.0 + 4.0 * sf.eps) * sf.a**2
            worst["gauss"] = max(worst["gauss"],
                                 abs(lhs - rhs) / max(1.0, abs(lhs)))
        inp = stability.QSumInput(
            H=float(rng.uniform(0.0, 2.0)), a=float(rng.uniform(-2.0, 2.0)),
            eps=float(rng.uniform(-4.0, 4.0)),
            nu=float(rng.uniform(-1.0, 1.0)),
            x_norm2=float(rng.uniform(0.0, 3.0)))
        y = 1.0 - inp.nu**2
        expanded = ((4.0 * inp.H**2 + (6.0 + 4.0 * inp.eps) * inp.a**2)
                    * inp.x_norm2
                    - stability.codim1_ii_terms(inp.a, inp.eps, inp.nu,
                                                inp.x_norm2))
        worst["qsum"] = max(worst["qsum"],
                            abs(stability.qsum(inp) - expanded)
                            / max(1.0, abs(expanded)))
    ok = all(v <= 1e-12 for v in worst.values())
    assert _line(9, "structural-identities", ok,
                 ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_10_radial_monotonicity_condition():
    dss = warping.DeSitterSchwarzschild(1.0, 0.0, cap=40.0)
    worst_eq = 0.0
    for r in np.linspace(1.05, 6.0, 100):
        chk = radial_monotonicity_condition(dss, dss.t_of_r(r))
        worst_eq = max(worst_eq, abs(chk.lhs - chk.rhs) / abs(chk.rhs))
    rn = warping.ReissnerNordstrom(2.0, 0.5, cap=40.0)
    worst_gap = 0.0
    for r in np.linspace(1.9, 8.0, 100):
        t = rn.t_of_r(r)
        chk = radial_monotonicity_condition(rn, t)
        h, hp, _ = rn.eval(t)
        want = 2.0 * 0.25 * hp / h**5
        worst_gap = max(worst_gap,
                        abs((chk.rhs - chk.lhs) - want) / want)
    ok = worst_eq <= 1e-9 and worst_gap <= 1e-9
    assert _line(10, "radial-monotonicity-condition", ok,
                 f"equality {worst_eq:.2e}, gap {worst_gap:.2e}")


def _profile_regime(model):
    t0, t1 = model.t_domain()
    ts = np.linspace(t0 + 1e-9, t1 - 1e-9, 801)
    eps = []
    for t in ts:
        st = curvature_state(model, t)
        if st.k_tan <= 0.0:
            return "inapplicable"
        eps.append(st.k_rad / st.k_tan - 1.0)
    if all(stability.eps_window_check(e) for e in (min(eps), max(eps))):
        return "window"
    return "threshold"


def test_11_classification_regression():
    b_star = 1.0 / math.sqrt(2.0 + SQRT5)
    ok = True
    for b in (b_star * 1.01, 0.6, 0.8, 1.0):
        ok = ok and _profile_regime(warping.ellipsoid_model(b)) == "window"
    for b in (b_star * 0.99, 0.4, 0.25):
        ok = ok and _profile_regime(warping.ellipsoid_model(b)) == "threshold"
    hyp = warping.hyperboloid_model(1.0, s_max=3.0)
    t0, t1 = hyp.t_domain()
    res = stability.c0(hyp, (t0 + 1e-9, t1 - 1e-9))
    c0_err = abs(res.value - 1.0)
    ok = ok and c0_err <= 1e-8
    assert _line(11, "classification-regression", ok,
                 f"split at {b_star:.4f}, hyperboloid c0 err {c0_err:.2e}")
