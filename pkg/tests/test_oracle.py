"""Finite-difference differential geometry oracle."""

import math

import numpy as np
import pytest

from warpstab import oracle, warping
from warpstab.errors import InvalidParameters, OutOfDomain


def _flat_metric():
    def g(x):
        t, p1, _ = x
        return np.diag([1.0, t * t, (t * np.sin(p1)) ** 2])
    return oracle.CoordMetric(g, "flat")


def test_christoffel_flat_hand_values():
    metric = _flat_metric()
    x = np.array([1.0, math.pi / 2.0, 0.4])
    G = oracle.christoffel_fd(metric, x)
    # at the equator sin = 1: Gamma^t_{p2 p2} = -h h' sin^2 = -1
    assert math.isclose(G[0, 2, 2], -1.0, rel_tol=0, abs_tol=1e-9)
    assert math.isclose(G[0, 1, 1], -1.0, rel_tol=0, abs_tol=1e-9)
    assert math.isclose(G[1, 0, 1], 1.0, rel_tol=0, abs_tol=1e-9)
    assert math.isclose(G[2, 0, 2], 1.0, rel_tol=0, abs_tol=1e-9)
    # equator: d/dphi1 of sin^2 vanishes
    assert abs(G[1, 2, 2]) < 1e-9


def test_christoffel_symmetry_lower_indices():
    model = warping.DeSitterSchwarzschild(1.0, 0.0, cap=20.0)
    metric = oracle.metric_from_model(model)
    x = np.array([model.t_of_r(2.5), 1.1, 0.7])
    G = oracle.christoffel_fd(metric, x)
    np.testing.assert_allclose(G, np.transpose(G, (0, 2, 1)), rtol=0,
                               atol=1e-12)


def test_christoffel_dss_radial_entry():
    model = warping.DeSitterSchwarzschild(1.0, 0.0, cap=20.0)
    metric = oracle.metric_from_model(model)
    t = model.t_of_r(3.0)
    h, hp, _ = model.eval(t)
    G = oracle.christoffel_fd(metric, np.array([t, 1.3, 0.7]))
    assert math.isclose(G[0, 1, 1], -h * hp, rel_tol=1e-8)


def test_pole_guard():
    metric = _flat_metric()
    with pytest.raises(OutOfDomain):
        oracle.christoffel_fd(metric, np.array([1.0, 0.05, 0.4]))


def test_sectional_fd_space_forms():
    rng = np.random.default_rng(11)
    for c in (-1.0, 1.0):
        model = warping.SpaceForm(c, cap=10.0)
        metric = oracle.metric_from_model(model)
        x = np.array([1.2, 1.3, 0.8])
        R = oracle.riemann_fd(metric, x)
        for _ in range(5):
            X, Y = rng.uniform(-1.0, 1.0, size=(2, 3))
            K = oracle.sectional_fd(metric, x, X, Y, R=R)
            assert math.isclose(K, c, rel_tol=0, abs_tol=5e-6), c


def test_ricci_space_form_proportional_to_metric():
    model = warping.SpaceForm(1.0)
    metric = oracle.metric_from_model(model)
    x = np.array([0.9, 1.2, 0.5])
    R = oracle.riemann_fd(metric, x)
    ric = oracle.ricci_from_riemann(R)
    np.testing.assert_allclose(ric, 2.0 * metric(x), rtol=0, atol=1e-5)


def test_bianchi_residual_small():
    model = warping.ReissnerNordstrom(2.0, 0.5, cap=20.0)
    metric = oracle.metric_from_model(model)
    x = np.array([model.t_of_r(3.0), 1.0, 0.9])
    R = oracle.riemann_fd(metric, x)
    assert oracle.bianchi_residual(R) <= 1e-8


def test_step_halving_fourth_order():
    # truncation of the assembled tensor must fall ~16x per halving
    model = warping.SpaceForm(1.0)
    metric = oracle.metric_from_model(model)
    x = np.array([1.0, 1.2, 0.8])
    X = np.array([1.0, 0.4, -0.2])
    Y = np.array([-0.3, 1.0, 0.5])
    errs = []
    for step in (0.08, 0.04, 0.02):
        K = oracle.sectional_fd(metric, x, X, Y, step=step)
        errs.append(abs(K - 1.0))
    for e_coarse, e_fine in zip(errs, errs[1:]):
        if e_fine < 1e-11:
            break  # roundoff floor
        assert e_coarse / e_fine >= 8.0, errs


def test_orthonormal_frame_requires_diagonal():
    with pytest.raises(InvalidParameters):
        oracle._orthonormal_frame(np.array([[1.0, 0.2, 0.0],
                                            [0.2, 1.0, 0.0],
                                            [0.0, 0.0, 1.0]]))


def test_verify_model_passes_on_builtins():
    cases = [
        (warping.SpaceForm(1.0), (0.3, math.pi - 0.3)),
        (warping.SpaceForm(-1.0, cap=10.0), (0.3, 3.0)),
    ]
    model = warping.DeSitterSchwarzschild(1.0, 0.05)
    cases.append((model, (model.t_of_r(1.2), model.t_of_r(3.6))))
    for m, iv in cases:
        rep = oracle.verify_model(m, iv, shape=(6, 4))
        assert rep.passed, rep.lines()


def test_verify_model_report_lines():
    model = warping.SpaceForm(1.0)
    rep = oracle.verify_model(model, (0.4, 2.6), shape=(4, 3))
    lines = rep.lines()
    assert any(line.startswith("passed=") for line in lines)
    assert any(line.startswith("bianchi=") for line in lines)


def test_verify_model_rejects_tight_interval():
    model = warping.SpaceForm(1.0)
    with pytest.raises(OutOfDomain):
        oracle.verify_model(model, (0.01, math.pi - 0.01))
