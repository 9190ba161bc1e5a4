"""Rotational isometric embeddings of warped products into flat 4-space.

When k_tan has one sign on an interval, the warped product dt^2 + h^2 dw^2
embeds as the rotational hypersurface

    F(t, phi1, phi2) = (f(t), h(t) w(phi1, phi2)),      w in S^2 in R^3,

of the flat space with inner product <u, v> = kappa u0 v0 + u.v, where
kappa = sign(k_tan): Euclidean R^4 for kappa = +1, Lorentzian for -1.
The profile slope is pinned by the defining relation

    kappa f'^2 + h'^2 = 1,        f' = sqrt(|k_tan|) h >= 0.

The second fundamental form w.r.t. the unit normal E = (-h', kappa f' w) is
conformal to the metric plus a radial correction:

    II = a <.,.> + eps a dt^2,    a = kappa sqrt(|k_tan|),
                                  eps = (k_rad - k_tan)/k_tan,

so its principal values are (a (1 + eps), a, a).  The numeric route below
recovers the same entries from 4th-order finite differences of F alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .csvout import write_csv
from .curvature import curvature_state
from .errors import EmbeddingError, InvalidParameters, OutOfDomain
from .quadrature import cumulative_integral, panel_integral

__all__ = [
    "SecondForm",
    "second_form_closed",
    "mean_vector_norm",
    "FlatEmbedding",
    "build_embedding",
    "second_form_numeric",
]

_POLE_MARGIN = 0.1


@dataclass(frozen=True)
class SecondForm:
    """Closed-form shape data of the rotational embedding at one t."""

    kappa: int
    a: float            # conformal principal value, kappa sqrt(|k_tan|)
    eps: float          # radial distortion (k_rad - k_tan)/k_tan
    delta: float        # eps a^2
    coeff_metric: float  # = a
    coeff_dt2: float     # = eps a = (k_rad - k_tan)/sqrt(|k_tan|)

    @property
    def principal_values(self) -> tuple[float, float, float]:
        return self.a * (1.0 + self.eps), self.a, self.a


def second_form_closed(model, t: float) -> SecondForm:
    """Shape operator parameters (kappa, a, eps) at parameter t."""
    st = curvature_state(model, t)
    kt, kr = st.k_tan, st.k_rad
    if abs(kt) < 1e-12:
        raise EmbeddingError(
            f"tangential curvature vanishes at t = {t:.6g}; no rotational "
            "embedding with a well-defined shape operator")
    kappa = 1 if kt > 0.0 else -1
    a = kappa * math.sqrt(abs(kt))
    eps = (kr - kt) / kt
    return SecondForm(kappa=kappa, a=a, eps=eps, delta=eps * a * a,
                      coeff_metric=a, coeff_dt2=eps * a)


def mean_vector_norm(model, t: float) -> float:
    """Norm |a (3 + eps)|/3 of the embedding's mean shape vector."""
    sf = second_form_closed(model, t)
    return abs(sf.a * (3.0 + sf.eps)) / 3.0


def _omega(phi1: float, phi2: float) -> np.ndarray:
    s1 = math.sin(phi1)
    return np.array([s1 * math.cos(phi2), s1 * math.sin(phi2), math.cos(phi1)])


@dataclass
class FlatEmbedding:
    """Tabulated rotational embedding over [t_lo, t_hi].

    f is accumulated on a uniform grid; values between nodes come from one
    extra quadrature panel, so point() is smooth to quadrature accuracy.
    """

    model: object
    kappa: int
    t_lo: float
    t_hi: float
    tgrid: np.ndarray
    fgrid: np.ndarray
    _nodes: int = field(default=24, repr=False)

    def fprime(self, t: float) -> float:
        """Profile slope sqrt(kappa (1 - h'^2)) = sqrt(|k_tan|) h."""
        h, hp, _ = self.model.eval(t)
        v = self.kappa * (1.0 - hp * hp)
        if v < -1e-10 * max(1.0, hp * hp):
            raise EmbeddingError(
                f"defining relation violated at t = {t:.6g}: kappa (1 - h'^2) "
                f"= {v:.3e} < 0")
        return math.sqrt(max(v, 0.0))

    def f_at(self, t: float) -> float:
        if t < self.t_lo - 1e-12 or t > self.t_hi + 1e-12:
            raise OutOfDomain(f"t = {t} outside embedding range "
                              f"[{self.t_lo}, {self.t_hi}]")
        t = min(max(t, self.t_lo), self.t_hi)
        k = int(np.clip(np.searchsorted(self.tgrid, t, side="right") - 1,
                        0, len(self.tgrid) - 2))
        fp = lambda s: np.array([self.fprime(x) for x in np.atleast_1d(s)])
        return float(self.fgrid[k] + panel_integral(fp, self.tgrid[k], t,
                                                    n=self._nodes))

    def point(self, t: float, phi1: float, phi2: float) -> np.ndarray:
        """Position F(t, phi1, phi2) in flat 4-space."""
        h = self.model.eval(t)[0]
        return np.concatenate(([self.f_at(t)], h * _omega(phi1, phi2)))

    def normal(self, t: float, phi1: float, phi2: float) -> np.ndarray:
        """Unit normal E = (-h', kappa f' w); <E, E> = kappa."""
        _, hp, _ = self.model.eval(t)
        return np.concatenate(([-hp], self.kappa * self.fprime(t)
                               * _omega(phi1, phi2)))

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        """Flat inner product, first coordinate weighted by kappa."""
        return float(self.kappa * u[0] * v[0] + np.dot(u[1:], v[1:]))

    def relation_residual(self) -> float:
        """max |kappa f'^2 + h'^2 - 1| over the grid."""
        worst = 0.0
        for t in self.tgrid:
            _, hp, _ = self.model.eval(t)
            fp = self.fprime(t)
            worst = max(worst, abs(self.kappa * fp * fp + hp * hp - 1.0))
        return worst

    def to_csv(self, target) -> None:
        hs = [self.model.eval(t)[0] for t in self.tgrid]
        write_csv(target, ["t", "f", "h"], zip(self.tgrid, self.fgrid, hs))


def build_embedding(model, t_interval, n_grid: int = 257) -> FlatEmbedding:
    """Construct the rotational embedding over t_interval.

    The sign of k_tan is scanned on the grid first; a vanishing value or a
    sign change means no single rotational embedding exists there.
    """
    t_lo, t_hi = map(float, t_interval)
    if not t_hi > t_lo:
        raise InvalidParameters(f"empty interval [{t_lo}, {t_hi}]")
    d0, d1 = model.t_domain()
    if t_lo < d0 - 1e-12 or t_hi > d1 * (1 + 1e-12) + 1e-12:
        raise OutOfDomain(f"interval [{t_lo}, {t_hi}] not inside domain "
                          f"[{d0}, {d1}]")
    if n_grid < 9:
        raise InvalidParameters(f"n_grid must be >= 9, got {n_grid}")

    tgrid = np.linspace(t_lo, t_hi, n_grid)
    kts = np.array([curvature_state(model, t).k_tan for t in tgrid])
    if np.any(np.abs(kts) < 1e-12):
        raise EmbeddingError("tangential curvature vanishes on the interval")
    if np.any(kts > 0) and np.any(kts < 0):
        raise EmbeddingError("tangential curvature changes sign on the interval")
    kappa = 1 if kts[0] > 0 else -1

    emb = FlatEmbedding(model=model, kappa=kappa, t_lo=t_lo, t_hi=t_hi,
                        tgrid=tgrid, fgrid=np.zeros(n_grid))
    fp = lambda s: np.array([emb.fprime(x) for x in np.atleast_1d(s)])
    emb.fgrid = cumulative_integral(fp, tgrid, n=emb._nodes)
    return emb


_D1 = (np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0, (-2, -1, 0, 1, 2))
_D2 = (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0, (-2, -1, 0, 1, 2))


def _second_partials(fvec, x: np.ndarray, i: int, j: int, steps: np.ndarray):
    """4th-order mixed/pure second partial of a vector map at x."""
    if i == j:
        w, offs = _D2
        acc = np.zeros(4)
        for c, p in zip(w, offs):
            xp = x.copy()
            xp[i] += p * steps[i]
            acc += c * fvec(xp)
        return acc / (steps[i] * steps[i])
    w, offs = _D1
    acc = np.zeros(4)
    for ci, pi in zip(w, offs):
        if ci == 0.0:
            continue
        for cj, pj in zip(w, offs):
            if cj == 0.0:
                continue
            xp = x.copy()
            xp[i] += pi * steps[i]
            xp[j] += pj * steps[j]
            acc += ci * cj * fvec(xp)
    return acc / (steps[i] * steps[j])


def second_form_numeric(emb: FlatEmbedding, t: float, phi1: float,
                        phi2: float = 0.8, step: float = 1e-3,
                        tol: float = 1e-6) -> np.ndarray:
    """Second fundamental form matrix sampled by finite differences.

    Entries are -<d^2 F/dx_i dx_j, E> normalized by the orthonormal frame
    scales (1, h, h sin(phi1)).  Computed at `step` and `step/2`; if the two
    disagree beyond tol the Richardson combination (16 fine - coarse)/15 is
    returned instead of the fine value.

    phi1 must stay at least 0.1 away from the coordinate poles, and t at
    least 2*step inside the embedding interval.
    """
    if not (_POLE_MARGIN <= phi1 <= math.pi - _POLE_MARGIN):
        raise OutOfDomain(
            f"phi1 = {phi1} too close to a coordinate pole; keep it in "
            f"[{_POLE_MARGIN}, pi - {_POLE_MARGIN}]")
    if t - 2 * step < emb.t_lo or t + 2 * step > emb.t_hi:
        raise OutOfDomain(f"t = {t} leaves no room for the stencil")

    h = emb.model.eval(t)[0]
    x0 = np.array([t, phi1, phi2])
    E = emb.normal(t, phi1, phi2)
    lam = np.array([1.0, h, h * math.sin(phi1)])

    def fvec(x):
        return emb.point(x[0], x[1], x[2])

    def sample(dt: float) -> np.ndarray:
        steps = np.array([dt, dt, dt])
        out = np.empty((3, 3))
        for i in range(3):
            for j in range(i, 3):
                d2 = _second_partials(fvec, x0, i, j, steps)
                out[i, j] = out[j, i] = -emb.inner(d2, E) / (lam[i] * lam[j])
        return out

    coarse = sample(step)
    fine = sample(0.5 * step)
    if np.max(np.abs(fine - coarse)) <= tol * max(1.0, float(np.max(np.abs(fine)))):
        return fine
    return (16.0 * fine - coarse) / 15.0
