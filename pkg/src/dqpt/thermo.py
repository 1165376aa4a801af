"""Rate function of an infinite chain.

    lambda(t) = -(1/2pi) int_0^{2pi} ln[1 - Lambda_k sin^2(eps_f(k) t)] dk

At a critical time the integrand has a logarithmic singularity at the
critical momenta.  Those points are known in advance, so the interval is
split there and each panel is integrated by adaptive Gauss-Legendre
bisection; the singularity then only ever sits at a panel endpoint, where
Gauss nodes never land.
"""
from __future__ import annotations

import heapq
import math

import numpy as np

from .band_models import Quench, lambda_k, mode_data
from .critical import solve_critical_momenta
from .errors import QuadratureError
from .loschmidt import RateSeries

__all__ = ["thermo_rate", "thermo_series", "adaptive_gauss"]

_ORDER = 20
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)


def _gauss(f, a, b):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _NODES
    return half * float(np.dot(_WEIGHTS, f(x)))


def adaptive_gauss(f, breakpoints, tol=1e-8, max_level=30):
    """Integrate a vectorized ``f`` over consecutive ``breakpoints``.

    Globally adaptive: the panel with the largest error estimate (whole
    panel vs. its two halves) is bisected until the summed estimates drop
    below ``tol``.  Endpoint log singularities converge geometrically under
    this scheme.  Raises QuadratureError, carrying the best estimate, if the
    worst panel has already been bisected ``max_level`` times.
    """
    pts = np.asarray(breakpoints, dtype=float)
    heap = []
    err_sum = 0.0

    def push(a, b, level):
        nonlocal err_sum
        m = 0.5 * (a + b)
        left, right = _gauss(f, a, m), _gauss(f, m, b)
        err = abs(left + right - _gauss(f, a, b))
        err_sum += err
        heapq.heappush(heap, (-err, a, b, level, left + right))

    for a, b in zip(pts[:-1], pts[1:]):
        push(a, b, 0)
    while err_sum > tol:
        neg_err, a, b, level, _ = heap[0]
        if level >= max_level:
            raise QuadratureError(
                f"adaptive quadrature did not converge (error estimate {err_sum:.3g})",
                _ordered_sum(heap),
            )
        heapq.heappop(heap)
        err_sum += neg_err
        m = 0.5 * (a + b)
        push(a, m, level + 1)
        push(m, b, level + 1)
    return _ordered_sum(heap)


def _ordered_sum(heap):
    # fixed left-to-right order keeps results bit-reproducible
    return math.fsum(v for _, a, _, _, v in sorted(heap, key=lambda p: p[1]))


def _is_even(quench: Quench, rng_seed=7) -> bool:
    ks = np.random.default_rng(rng_seed).uniform(0.0, math.pi, 8)
    return bool(np.allclose(lambda_k(quench, ks), lambda_k(quench, 2 * math.pi - ks), atol=1e-12))


def _integrand(quench, t):
    def f(k):
        overlap_sq, eps_f = mode_data(quench, k)
        phase = eps_f * t
        s, c = np.sin(phase), np.cos(phase)
        le = c * c + overlap_sq * s * s
        with np.errstate(divide="ignore"):
            return np.log(le)
    return f


def thermo_rate(quench: Quench, t: float, base_panels: int = 8, tol: float = 1e-8,
                critical_momenta=None) -> float:
    """Infinite-size rate function at time ``t`` (1D models only)."""
    if quench.dims != 1:
        raise ValueError("the continuum rate function is implemented for 1D models only")
    if t < 0:
        raise ValueError("time must be non-negative")
    if t == 0:
        return 0.0
    if critical_momenta is None:
        critical_momenta = solve_critical_momenta(quench)
    f = _integrand(quench, t)
    if _is_even(quench):
        splits = {0.0, math.pi, *[k for k in critical_momenta if 0 < k < math.pi]}
        scale = 2.0
        hi = math.pi
    else:
        splits = {0.0, 2 * math.pi}
        for k in critical_momenta:
            splits.update({k, 2 * math.pi - k})
        scale = 1.0
        hi = 2 * math.pi
    splits = sorted(splits)
    pts = []
    for a, b in zip(splits[:-1], splits[1:]):
        pts.extend(np.linspace(a, b, base_panels + 1)[:-1])
    pts.append(hi)
    integral = adaptive_gauss(f, pts, tol=tol / scale)
    return -scale * integral / (2 * math.pi)


def thermo_series(quench: Quench, times, **kwargs) -> RateSeries:
    """Elementwise thermo_rate over ascending ``times``."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be ascending")
    ks = solve_critical_momenta(quench)
    rate = [thermo_rate(quench, float(t), critical_momenta=ks, **kwargs) for t in times]
    return RateSeries(times, np.array(rate), None, {**quench.describe(), "sizes": ["inf"]})
