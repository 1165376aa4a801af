"""Critical momenta, fluxes and times of exact Loschmidt-echo zeros.

A mode echo vanishes only where the pre- and postquench d-vectors are
orthogonal.  That orthogonality condition is solved in closed form for
the SSH chain and the Creutz ladder, by bracketing root search for the
long-range chain, and by enumeration over the untwisted axis for the
Qi-Wu-Zhang model.  A solved momentum k_c is made an allowed momentum of
a ring of L cells by the flux min{L k_c, -L k_c} mod 2 pi, and the echo
vanishes at t_n = pi (2n - 1) / (2 eps_f(k_c)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .band_models import QWZ, SSH, Creutz, LongRangeSSH, Quench, band_energy, inner_product
from .errors import DegenerateModeError, NoCriticalMomentumError, NotAvailableError

__all__ = [
    "CriticalPair",
    "CriticalSet",
    "constraint_residual",
    "scan_roots",
    "solve_critical_momenta",
    "critical_flux",
    "critical_times",
    "critical_set",
    "asymptotic_le",
    "qwz_t1_interval",
    "qwz_critical_pairs",
]

TWO_PI = 2.0 * math.pi


@dataclass
class CriticalPair:
    """One critical momentum (the positive member of a +/- pair in 1D).

    ``axis`` names the twisted direction for the 2D model; ``phi_c`` is then
    a single value for 'x' or 'y' and a pair for 'both'.
    """

    k_c: object
    epsilon_f: float
    phi_c: object
    t_star: list
    axis: Optional[str] = None

    def as_dict(self) -> dict:
        k = np.atleast_1d(self.k_c).astype(float)
        phi = np.atleast_1d(self.phi_c).astype(float)
        out = {
            "k_c": k.tolist() if k.size > 1 else float(k[0]),
            "k_c_over_pi": (k / math.pi).tolist() if k.size > 1 else float(k[0] / math.pi),
            "epsilon_f": self.epsilon_f,
            "phi_c": phi.tolist() if phi.size > 1 else float(phi[0]),
            "phi_c_over_pi": (phi / math.pi).tolist() if phi.size > 1 else float(phi[0] / math.pi),
            "t_star": list(self.t_star),
        }
        if self.axis is not None:
            out["axis"] = self.axis
        return out


@dataclass
class CriticalSet:
    pairs: list
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def as_dict(self) -> dict:
        return {"metadata": self.metadata, "pairs": [p.as_dict() for p in self.pairs]}


def constraint_residual(quench: Quench, k):
    """sum_{x,y,z} d(initial, k) . d(final, k); zero at critical momenta."""
    return inner_product(quench, k)


def scan_roots(f, a: float, b: float, panels: int = 2048, xtol: float = 1e-13):
    """All sign changes of ``f`` on [a, b], located by a uniform scan and
    refined with Brent's bracketing method.  Returned in ascending order.
    Sample points where ``f`` is exactly zero are returned as roots.  ``f``
    is called once on the whole sample array if it accepts one.
    """
    xs = np.linspace(a, b, panels + 1)
    try:
        fs = np.asarray(f(xs), dtype=float)
    except (TypeError, ValueError):
        fs = None
    if fs is None or fs.shape != xs.shape:
        fs = np.array([f(x) for x in xs], dtype=float)
    roots = []
    for i in range(panels):
        fa, fb = fs[i], fs[i + 1]
        if fa == 0.0:
            roots.append(float(xs[i]))
        elif fa * fb < 0:
            roots.append(float(brentq(f, xs[i], xs[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps)))
    if fs[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


def _ssh_roots(gi, gf):
    denom = gi + gf
    num = 1.0 + gi * gf
    if denom == 0.0:
        if num != 0.0:
            raise NoCriticalMomentumError(
                f"SSH closed form undefined for gamma_f = -gamma_i ({gi}, {gf}); "
                "the orthogonality condition has no solution"
            )
        raise DegenerateModeError(f"gamma_i={gi}, gamma_f={gf} makes both chains gapless")
    arg = -num / denom
    if -1.0 <= arg <= 1.0:
        return [math.acos(arg)]
    return []


def _creutz_roots(thi, thf, jv):
    a = math.sin(thi) * math.sin(thf)
    disc = a * (jv * jv - 1.0 + a)
    if disc < 0 or abs(1.0 - a) < 1e-15:
        return []
    root = math.sqrt(disc)
    out = []
    for c in ((-jv + root) / (1.0 - a), (-jv - root) / (1.0 - a)):
        if -1.0 <= c <= 1.0:
            out.append(math.acos(c))
    # a double root is one momentum, not two
    out = sorted(set(out))
    return out


def solve_critical_momenta(quench: Quench, method: str = "auto", panels: int = 2048):
    """Critical momenta in (0, pi], ascending; the -k_c partners are implied.

    ``method='auto'`` uses the closed forms for SSH and Creutz and the root
    scan otherwise; ``method='numeric'`` forces the scan for any 1D model.
    """
    if quench.dims != 1:
        raise ValueError("use qwz_critical_pairs for two-dimensional models")
    ini, fin = quench.initial, quench.final
    if method == "auto" and isinstance(ini, SSH):
        roots = _ssh_roots(ini.gamma, fin.gamma)
    elif method == "auto" and isinstance(ini, Creutz):
        roots = _creutz_roots(ini.theta, fin.theta, ini.jv_tilde)
    elif method in ("auto", "numeric"):
        roots = scan_roots(lambda k: constraint_residual(quench, k), 0.0, math.pi, panels)
        roots = [k for k in roots if k > 0.0]
    else:
        raise ValueError(f"unknown method {method!r}")
    return sorted(roots)


def critical_flux(k_c: float, L: int) -> float:
    """Smallest flux in [0, pi] placing k_c (or -k_c) on the L-site grid."""
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    plus = math.fmod(L * k_c, TWO_PI)
    if plus < 0:
        plus += TWO_PI
    minus = math.fmod(-L * k_c, TWO_PI)
    if minus < 0:
        minus += TWO_PI
    if plus >= TWO_PI:
        plus = 0.0
    if minus >= TWO_PI:
        minus = 0.0
    return min(plus, minus)


def critical_times(quench: Quench, k_c, n_max: int = 2):
    """t_n = pi (2n - 1) / (2 eps_f(k_c)) for n = 1 .. n_max."""
    eps = band_energy(quench.final, k_c)
    if eps <= 1e-14:
        raise DegenerateModeError(f"postquench band is gapless at k_c = {k_c}")
    return _times_from_energy(eps, n_max)


def _times_from_energy(eps, n_max):
    return [math.pi * (2 * n - 1) / (2.0 * eps) for n in range(1, n_max + 1)]


def critical_set(quench: Quench, L: int, n_max: int = 2, method: str = "auto") -> CriticalSet:
    """Critical momenta, fluxes and times of a 1D quench on L cells."""
    if isinstance(quench.initial, LongRangeSSH) and 2 * quench.initial.half_range != L:
        raise ValueError(
            f"long-range model was built for L={2 * quench.initial.half_range}, not L={L}"
        )
    pairs = []
    for k_c in solve_critical_momenta(quench, method):
        eps = float(band_energy(quench.final, k_c))
        pairs.append(CriticalPair(k_c, eps, critical_flux(k_c, L), _times_from_energy(eps, n_max)))
    return CriticalSet(pairs, {**quench.describe(), "L": L, "n_max": n_max})


def asymptotic_le(quench: Quench, k_c: float, t_star: float, L: int, delta: float) -> float:
    """Leading small-Delta mode echo at t_star for the mode k_c + Delta/L.

    Closed forms exist for the SSH chain and the Creutz ladder; for the
    latter ``k_c`` selects which of the two critical pairs is meant.
    """
    ini, fin = quench.initial, quench.final
    if isinstance(ini, SSH):
        gi, gf = ini.gamma, fin.gamma
        num = (gi + gf) ** 3 + gf**2 * t_star**2 * (gf - gi) * (1.0 - gi**2)
        return num * delta**2 / ((gf - gi) ** 2 * (gf + gi) * L**2)
    if isinstance(ini, Creutz):
        si, sf = math.sin(ini.theta), math.sin(fin.theta)
        jv = ini.jv_tilde
        sk2 = math.sin(k_c) ** 2
        c = sf * (jv * jv - 1.0 + si * sf) / (sk2 * (sf - si))
        b = 4.0 * (t_star**2 * (jv + math.cos(k_c) * math.cos(fin.theta) ** 2) ** 2 - c)
        b /= (sf - si) * sf * L**2
        return b * delta**2
    raise NotAvailableError(f"no asymptotic form for {quench.model}")


def _qwz_params(quench):
    if not isinstance(quench.initial, QWZ):
        raise ValueError("expected a Qi-Wu-Zhang quench")
    return quench.initial.mu, quench.final.mu


def _qwz_partner_cos(mi, mf, c):
    """cos of the second momentum component solving the QWZ constraint."""
    den = mi + mf + 2.0 * c
    if abs(den) < 1e-14:
        return None
    return (-mi * mf - (mi + mf) * c - 2.0) / den


def qwz_t1_interval(quench: Quench, n: int = 1):
    """Range of t_n over the whole continuum of critical pairs.

    Uses the closed-form band for mu_i in (0, 2), mu_f in (-2, 0); other
    cross-phase regimes are handled by a dense scan of the critical curve.
    Returns None when no critical pair exists.
    """
    mi, mf = _qwz_params(quench)
    if 0 < mi < 2 and -2 < mf < 0:
        lo = mf * (mf - 2.0) * (mf - mi) / (mi + mf - 2.0)
        hi = mf * (mf + 2.0) * (mf - mi) / (mi + mf + 2.0)
        return (
            (2 * n - 1) * math.pi / (2.0 * math.sqrt(lo)),
            (2 * n - 1) * math.pi / (2.0 * math.sqrt(hi)),
        )
    eps = []
    for kx in np.linspace(0.0, math.pi, 20001):
        cy = _qwz_partner_cos(mi, mf, math.cos(kx))
        if cy is not None and -1.0 <= cy <= 1.0:
            eps.append(band_energy(quench.final, (kx, math.acos(cy))))
    if not eps:
        return None
    return (
        (2 * n - 1) * math.pi / (2.0 * max(eps)),
        (2 * n - 1) * math.pi / (2.0 * min(eps)),
    )


def _qwz_axis_pairs(quench, free_size, twisted_size, twist, n_max):
    """Pairs whose untwisted component sits on its periodic grid."""
    from .loschmidt import quantized_momenta

    mi, mf = _qwz_params(quench)
    pairs = []
    for kf in quantized_momenta(free_size, 0.0):
        cos_t = _qwz_partner_cos(mi, mf, math.cos(kf))
        if cos_t is None or not -1.0 <= cos_t <= 1.0:
            continue
        kt = math.acos(cos_t)
        for sign in ((1.0, -1.0) if kt > 0.0 else (1.0,)):
            k = (float(kf), sign * kt) if twist == "y" else (sign * kt, float(kf))
            eps = float(band_energy(quench.final, k))
            pairs.append(
                CriticalPair(k, eps, critical_flux(kt, twisted_size), _times_from_energy(eps, n_max), twist)
            )
    return pairs


def qwz_critical_pairs(quench: Quench, Lx: int, Ly: int, twist_axis: str = "either",
                       n_max: int = 2, n_continuum: int = 64) -> CriticalSet:
    """Critical momentum pairs of a Qi-Wu-Zhang quench on an Lx x Ly torus.

    twist_axis
        ``'x'``: k_y on its periodic grid, k_x solved and reached by phi_x.
        ``'y'``: the mirror case.  ``'either'``: union of both.
        ``'both'``: ``n_continuum`` points of the continuous critical curve,
        each reached by twisting both directions, with (phi_x, phi_y) from the
        single-axis rule applied per axis.
    """
    mi, mf = _qwz_params(quench)
    meta = {**quench.describe(), "Lx": Lx, "Ly": Ly, "twist_axis": twist_axis, "n_max": n_max}
    if twist_axis == "x":
        pairs = _qwz_axis_pairs(quench, Ly, Lx, "x", n_max)
    elif twist_axis == "y":
        pairs = _qwz_axis_pairs(quench, Lx, Ly, "y", n_max)
    elif twist_axis == "either":
        pairs = _qwz_axis_pairs(quench, Ly, Lx, "x", n_max) + _qwz_axis_pairs(quench, Lx, Ly, "y", n_max)
    elif twist_axis == "both":
        pairs = []
        for kx in np.linspace(0.0, math.pi, n_continuum):
            cy = _qwz_partner_cos(mi, mf, math.cos(kx))
            if cy is None or not -1.0 <= cy <= 1.0:
                continue
            k = (float(kx), math.acos(cy))
            eps = float(band_energy(quench.final, k))
            phi = (critical_flux(k[0], Lx), critical_flux(k[1], Ly))
            pairs.append(CriticalPair(k, eps, phi, _times_from_energy(eps, n_max), "both"))
    else:
        raise ValueError(f"twist_axis must be 'x', 'y', 'either' or 'both', got {twist_axis!r}")
    interval = qwz_t1_interval(quench) if pairs else None
    meta["t1_interval"] = None if interval is None else list(interval)
    return CriticalSet(pairs, meta)
