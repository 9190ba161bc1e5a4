"""Grid scan plus bounded local refinement for extrema of scalar functions."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InvalidParameters

__all__ = ["scan_min", "scan_max"]


def scan_min(f, a: float, b: float, n: int = 512) -> tuple[float, float]:
    """(min value, argmin) of f on [a, b]: dense grid, then bounded polish."""
    if not b > a:
        raise InvalidParameters(f"empty interval [{a}, {b}]")
    xs = np.linspace(a, b, n)
    vals = np.array([f(x) for x in xs])
    k = int(np.argmin(vals))
    lo = xs[max(k - 1, 0)]
    hi = xs[min(k + 1, n - 1)]
    best_v, best_x = float(vals[k]), float(xs[k])
    if hi > lo:
        res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun < best_v:
            best_v, best_x = float(res.fun), float(res.x)
    return best_v, best_x


def scan_max(f, a: float, b: float, n: int = 512) -> tuple[float, float]:
    """(max value, argmax) of f on [a, b]."""
    v, x = scan_min(lambda t: -f(t), a, b, n=n)
    return -v, x
