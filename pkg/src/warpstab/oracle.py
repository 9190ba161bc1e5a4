"""Finite-difference differential geometry, used to cross-check closed forms.

Everything here works on a coordinate metric evaluator x -> g(x) in the chart
x = (t, phi1, phi2), knowing nothing about warped products.  Christoffel
symbols come from 4th-order central differences of g; the curvature tensor
from 4th-order differences of the Christoffel symbols.  Index conventions:

    Gamma[k, i, j]  = Gamma^k_{ij}
    R[l, k, i, j]   = (R(d_i, d_j) d_k)^l
                    = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
                      + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik}
    Ric[k, j]       = R[i, k, i, j]

Sectional curvature K(X, Y) = <R(X,Y)Y, X>/gram is +1 on the unit sphere in
this convention.  The closed-form curvature operator of the curvature module
uses the opposite overall sign, which the comparison accounts for.

Points within 0.1 of the coordinate poles phi1 = 0, pi are rejected: the
metric degenerates there and difference quotients lose all accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import curvature_state, ricci_normal, riemann_apply, scalar_curvature
from .errors import InvalidParameters, OutOfDomain

__all__ = [
    "CoordMetric",
    "metric_from_model",
    "christoffel_fd",
    "riemann_fd",
    "ricci_from_riemann",
    "bianchi_residual",
    "sectional_fd",
    "OracleReport",
    "verify_model",
]

_POLE_MARGIN = 0.1
_W1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_OFF1 = (-2, -1, 1, 2)


class CoordMetric:
    """Callable coordinate metric x = (t, phi1, phi2) -> 3x3 array."""

    def __init__(self, fn, label: str = "metric"):
        self._fn = fn
        self.label = label

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self._fn(np.asarray(x, dtype=float)), dtype=float)


def metric_from_model(model) -> CoordMetric:
    """diag(1, h^2, h^2 sin^2 phi1) with h = h(t) from the model."""

    def fn(x):
        h = model.eval(float(x[0]))[0]
        s = math.sin(float(x[1]))
        return np.diag([1.0, h * h, h * h * s * s])

    return CoordMetric(fn, label=f"warped:{model.kind}")


def _check_pole(phi1: float) -> None:
    if not (_POLE_MARGIN <= phi1 <= math.pi - _POLE_MARGIN):
        raise OutOfDomain(
            f"phi1 = {phi1} within {_POLE_MARGIN} of a coordinate pole")


def christoffel_fd(metric: CoordMetric, x, step: float = 5e-3) -> np.ndarray:
    """Christoffel symbols Gamma[k, i, j] by 4th-order differencing of g."""
    x = np.asarray(x, dtype=float)
    _check_pole(float(x[1]))
    if step <= 0.0:
        raise InvalidParameters(f"step must be positive, got {step}")
    ginv = np.linalg.inv(metric(x))
    dg = np.empty((3, 3, 3))
    for k in range(3):
        acc = np.zeros((3, 3))
        for c, p in zip(_W1, _OFF1):
            xp = x.copy()
            xp[k] += p * step
            acc += c * metric(xp)
        dg[k] = acc / step
    # T[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    T = dg + np.transpose(dg, (1, 0, 2)) - np.transpose(dg, (1, 2, 0))
    return 0.5 * np.einsum("kl,ijl->kij", ginv, T)


def riemann_fd(metric: CoordMetric, x, step: float = 5e-3) -> np.ndarray:
    """Curvature tensor R[l, k, i, j] by differencing Christoffel symbols."""
    x = np.asarray(x, dtype=float)
    G = christoffel_fd(metric, x, step=step)
    dG = np.empty((3, 3, 3, 3))
    for i in range(3):
        acc = np.zeros((3, 3, 3))
        for c, p in zip(_W1, _OFF1):
            xp = x.copy()
            xp[i] += p * step
            acc += c * christoffel_fd(metric, xp, step=step)
        dG[i] = acc / step
    D1 = np.einsum("iljk->lkij", dG)
    D2 = np.einsum("jlik->lkij", dG)
    Q1 = np.einsum("lim,mjk->lkij", G, G)
    Q2 = np.einsum("ljm,mik->lkij", G, G)
    return D1 - D2 + Q1 - Q2


def ricci_from_riemann(R: np.ndarray) -> np.ndarray:
    """Ricci tensor Ric[k, j] = R[i, k, i, j]."""
    return np.einsum("ikij->kj", R)


def bianchi_residual(R: np.ndarray) -> float:
    """max norm of the first-Bianchi cyclic sum over the vector slots."""
    cyc = R + np.transpose(R, (0, 3, 1, 2)) + np.transpose(R, (0, 2, 3, 1))
    return float(np.max(np.abs(cyc)))


def sectional_fd(metric: CoordMetric, x, X, Y, R: np.ndarray | None = None,
                 step: float = 5e-3) -> float:
    """Sectional curvature of span(X, Y) (coordinate components) at x."""
    x = np.asarray(x, dtype=float)
    if R is None:
        R = riemann_fd(metric, x, step=step)
    g = metric(x)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    W = np.einsum("lkij,k,i,j->l", R, Y, X, Y)
    gram = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    if gram <= 0.0:
        raise InvalidParameters("X and Y do not span a nondegenerate plane")
    return float(W @ g @ X) / gram


def _orthonormal_frame(g: np.ndarray) -> np.ndarray:
    off = np.max(np.abs(g - np.diag(np.diag(g))))
    if off > 1e-10 * np.max(np.abs(g)):
        raise InvalidParameters("expected a diagonal coordinate metric")
    return np.diag(1.0 / np.sqrt(np.diag(g)))


@dataclass(frozen=True)
class OracleReport:
    """Maximum relative errors of the closed forms against the fd oracle.

    Relative error uses denominator max(|closed|, |fd|, 1e-3) so that tiny
    curvatures far out on an unbounded domain do not inflate the report.
    """

    kind: str
    n_t: int
    n_phi: int
    step: float
    tol: float
    errors: dict[str, float]
    bianchi: float
    passed: bool

    def lines(self) -> list[str]:
        out = [f"model={self.kind}", f"grid={self.n_t}x{self.n_phi}",
               f"step={self.step:g}", f"tol={self.tol:g}"]
        out += [f"err[{k}]={v:.3e}" for k, v in sorted(self.errors.items())]
        out.append(f"bianchi={self.bianchi:.3e}")
        out.append(f"passed={str(self.passed).lower()}")
        return out


def _rel(closed: float, fd: float) -> float:
    # the 1e-2 floor turns the comparison absolute for near-zero targets:
    # tabulated warpings carry ~1e-14 evaluation jitter which the nested
    # differentiation amplifies to ~1e-9, so demanding a plain relative
    # error against an exact zero would always fail
    return abs(closed - fd) / max(abs(closed), abs(fd), 1e-2)


def verify_model(model, t_interval, shape: tuple[int, int] = (20, 10),
                 tol: float = 1e-6, step: float = 5e-3,
                 seed: int = 1234) -> OracleReport:
    """Compare closed-form curvature against the fd oracle on a grid.

    Checks the two sectional curvatures, Ric(N,N) across normal tilts
    nu in {-1, -1/2, 0, 1/2, 1}, the normalized scalar curvature, the full
    curvature operator on seeded random frames, and the first Bianchi
    identity of the fd tensor itself.
    """
    a, b = map(float, t_interval)
    t0, t1 = model.t_domain()
    # Richardson pair uses steps (step, 2 step); nested stencils then reach
    # out to 8 step from the base point
    pad = 9.0 * step
    if a < t0 + pad or b > t1 - pad or not b > a:
        raise OutOfDomain(
            f"need [{a}, {b}] inside [{t0 + pad}, {t1 - pad}] for the stencils")
    n_t, n_phi = shape
    metric = metric_from_model(model)
    rng = np.random.default_rng(seed)

    ts = np.linspace(a, b, n_t)
    # cot(phi1) in the connection has derivatives growing like phi1^-6, so
    # the fd truncation only stays small away from the coordinate poles
    phis = np.linspace(0.5, math.pi - 0.5, n_phi)
    nus = (-1.0, -0.5, 0.0, 0.5, 1.0)

    errs = {"k_tan": 0.0, "k_rad": 0.0, "ricci_normal": 0.0, "scal": 0.0,
            "riemann_frame": 0.0}
    worst_bianchi = 0.0

    for t in ts:
        st = curvature_state(model, t)
        for phi1 in phis:
            x = np.array([t, phi1, 0.9])
            g = metric(x)
            frame = _orthonormal_frame(g)
            # two-step Richardson removes the leading step^4 truncation of
            # the stencils, which the steep cot(phi1) terms otherwise expose;
            # pairing upward (step, 2 step) keeps the noise amplification of
            # the finer member at the base step level
            R_fine = riemann_fd(metric, x, step=step)
            R_coarse = riemann_fd(metric, x, step=2.0 * step)
            R = (16.0 * R_fine - R_coarse) / 15.0
            worst_bianchi = max(worst_bianchi, bianchi_residual(R))

            k12 = sectional_fd(metric, x, frame[1], frame[2], R=R)
            k01 = sectional_fd(metric, x, frame[0], frame[1], R=R)
            k02 = sectional_fd(metric, x, frame[0], frame[2], R=R)
            errs["k_tan"] = max(errs["k_tan"], _rel(st.k_tan, k12))
            errs["k_rad"] = max(errs["k_rad"], _rel(st.k_rad, k01),
                                _rel(st.k_rad, k02))

            ric = ricci_from_riemann(R)
            for nu in nus:
                N = nu * frame[0] + math.sqrt(max(1.0 - nu * nu, 0.0)) * frame[1]
                fd_val = float(N @ ric @ N)
                errs["ricci_normal"] = max(
                    errs["ricci_normal"], _rel(ricci_normal(st, nu), fd_val))

            scal_fd = float(np.einsum("kj,kj->", np.linalg.inv(g), ric)) / 6.0
            errs["scal"] = max(errs["scal"], _rel(scalar_curvature(st), scal_fd))

            for _ in range(3):
                Xf, Yf, Zf = rng.uniform(-1.0, 1.0, size=(3, 3))
                closed = riemann_apply(st, Xf, Yf, Zf)
                Xc, Yc, Zc = (frame.T @ Xf, frame.T @ Yf, frame.T @ Zf)
                W = -np.einsum("lkij,k,i,j->l", R, Zc, Xc, Yc)
                fd_frame = frame @ g @ W
                scale = max(float(np.max(np.abs(closed))),
                            float(np.max(np.abs(fd_frame))), 1e-3)
                errs["riemann_frame"] = max(
                    errs["riemann_frame"],
                    float(np.max(np.abs(closed - fd_frame))) / scale)

    passed = all(v <= tol for v in errs.values()) and worst_bianchi <= 1e-8
    return OracleReport(kind=model.kind, n_t=n_t, n_phi=n_phi, step=step,
                        tol=tol, errors=errs, bianchi=worst_bianchi,
                        passed=passed)
