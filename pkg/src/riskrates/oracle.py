"""Closed-form reference values and brute-force helpers used as ground truth."""
from __future__ import annotations

import numpy as np

from .errors import ParameterError


def avar_bernoulli(p: float, u: float) -> float:
    """AVaR_u of a Bernoulli(p) law: min(p / (1 - u), 1)."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must be in [0, 1], got {p}")
    if not 0.0 <= u < 1.0:
        raise ParameterError(f"u must be in [0, 1), got {u}")
    return min(p / (1.0 - u), 1.0)


def avar_pareto(q: float, u: float) -> float:
    """AVaR_u of the law with density q x^-(q+1) on [1, inf)."""
    if not q > 1.0:
        raise ParameterError(f"q must be > 1, got {q}")
    if not 0.0 <= u < 1.0:
        raise ParameterError(f"u must be in [0, 1), got {u}")
    return q / (q - 1.0) * (1.0 - u) ** (-1.0 / q)


def sharpness_two_point(a: float, eps: float) -> float:
    """sup_{x>=1} ((1 - x^-eps) a + x^-eps min(a x, 1)) = (1 - a^eps) a + a^eps."""
    if not 0.0 <= a <= 1.0:
        raise ParameterError(f"a must be in [0, 1], got {a}")
    if not eps > 0.0:
        raise ParameterError(f"eps must be > 0, got {eps}")
    return (1.0 - a**eps) * a + a**eps


def dyadic_sum(a: float, b: float, x: float, n_max: int = 400) -> float:
    """Truncated sum over n >= 1 of 2^(-a n) * min(x 2^n, 2^(b n)).

    Requires 0 <= b < a < 1 and n_max large enough that the geometric tail
    2^((b - a) n_max) is below 1e-12.
    """
    if not (0.0 <= b < a < 1.0):
        raise ParameterError(f"need 0 <= b < a < 1, got a={a}, b={b}")
    if x < 0:
        raise ParameterError(f"x must be nonnegative, got {x}")
    if 2.0 ** ((b - a) * n_max) >= 1e-12:
        raise ParameterError(f"n_max={n_max} too small for a={a}, b={b}")
    if x == 0.0:
        return 0.0
    n = np.arange(1, n_max + 1, dtype=float)
    terms = 2.0 ** (-a * n) * np.minimum(x * 2.0**n, 2.0 ** (b * n))
    return float(terms.sum())


def grid_min(f, lo: float, hi: float, points: int):
    """Brute-force minimum of ``f`` over a uniform grid; leftmost tie-break."""
    if not lo < hi:
        raise ParameterError(f"need lo < hi, got {lo}, {hi}")
    if points < 2:
        raise ParameterError(f"need at least 2 grid points, got {points}")
    xs = np.linspace(lo, hi, points)
    try:
        vals = np.asarray(f(xs), dtype=float)
        if vals.shape != xs.shape:
            raise TypeError
    except Exception:
        vals = np.array([f(x) for x in xs], dtype=float)
    k = int(np.argmin(vals))  # argmin returns the first minimizer
    return float(xs[k]), float(vals[k])
