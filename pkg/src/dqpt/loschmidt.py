"""Finite-size Loschmidt echo and rate function under twisted boundaries.

A flux phi threaded through a ring of L cells shifts every allowed
momentum by phi/L.  The echo is a product over the allowed momenta of
the mode echoes, accumulated here as a sum of logarithms so that L ~ 10^3
chains do not underflow.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .band_models import LongRangeSSH, Quench, mode_data

__all__ = [
    "UNDERFLOW",
    "MomentumGrid",
    "RateSeries",
    "quantized_momenta",
    "make_grid",
    "log_le_modes",
    "loschmidt_echo",
    "rate_function",
    "rate_at",
    "local_maxima",
    "refined_peaks",
    "first_peak",
    "lambda_max_vs_flux",
    "size_sweep",
    "resize",
]

#: mode echoes at or below this are treated as exact zeros
UNDERFLOW = 1e-300

# bound on the (times x momenta) block evaluated at once
_CHUNK = 1 << 21


def quantized_momenta(L: int, phi: float = 0.0) -> np.ndarray:
    """k = (2 pi m + phi)/L for m = -L/2 .. L/2-1 (even L) or
    -(L-1)/2 .. (L-1)/2 (odd L)."""
    if int(L) != L or L < 1:
        raise ValueError(f"size must be a positive integer, got {L}")
    L = int(L)
    m = np.arange(-(L // 2), L - L // 2, dtype=float)
    return (2.0 * np.pi * m + phi) / L


@dataclass(frozen=True)
class MomentumGrid:
    """Allowed momenta of a finite ring (or torus) threaded by flux."""

    sizes: tuple
    flux: tuple
    momenta: np.ndarray = field(repr=False, compare=False)

    @property
    def dims(self) -> int:
        return len(self.sizes)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.sizes))

    def describe(self) -> dict:
        return {"sizes": list(self.sizes), "flux": list(self.flux)}


def make_grid(dims: int, sizes, flux=0.0) -> MomentumGrid:
    """Build the twisted momentum grid.

    For ``dims == 2`` the grid is the Cartesian product of the two 1D rules,
    with k_x varying slowest; momenta then have shape (L_x * L_y, 2).
    """
    sizes = tuple(np.atleast_1d(sizes).tolist())
    flux = tuple(float(f) for f in np.atleast_1d(flux))
    if dims not in (1, 2):
        raise ValueError(f"dims must be 1 or 2, got {dims}")
    if len(flux) == 1 and dims == 2:
        flux = flux * 2
    if len(sizes) != dims or len(flux) != dims:
        raise ValueError(f"need {dims} size(s) and flux value(s), got {sizes}, {flux}")
    for L in sizes:
        if int(L) != L or L < 2:
            raise ValueError(f"sizes must be integers >= 2, got {sizes}")
    for f in flux:
        if not 0.0 <= f < 2.0 * np.pi:
            raise ValueError(f"flux must lie in [0, 2pi), got {f}")
    sizes = tuple(int(L) for L in sizes)
    if dims == 1:
        momenta = quantized_momenta(sizes[0], flux[0])
    else:
        kx = quantized_momenta(sizes[0], flux[0])
        ky = quantized_momenta(sizes[1], flux[1])
        gx, gy = np.meshgrid(kx, ky, indexing="ij")
        momenta = np.stack([gx.ravel(), gy.ravel()], axis=-1)
    return MomentumGrid(sizes, flux, momenta)


@dataclass
class RateSeries:
    """Sampled rate function; ``rate`` may contain +inf for exact echo zeros."""

    times: np.ndarray
    rate: np.ndarray
    le: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.rate = np.asarray(self.rate, dtype=float)
        if self.le is not None:
            self.le = np.asarray(self.le, dtype=float)
            if self.le.shape != self.times.shape:
                raise ValueError("le and times differ in length")
        if self.rate.shape != self.times.shape:
            raise ValueError("rate and times differ in length")

    def __len__(self):
        return len(self.times)


def _check_times(times) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.ndim != 1:
        raise ValueError("times must be one-dimensional")
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be ascending")
    return times


def _log_modes(overlap_sq, eps_f, times):
    """ln L_k(t) on the (times, momenta) block; -inf marks exact zeros."""
    phase = np.multiply.outer(times, eps_f)
    s = np.sin(phase)
    c = np.cos(phase)
    le = c * c + overlap_sq * (s * s)
    with np.errstate(divide="ignore"):
        out = np.log(le)
    out[le <= UNDERFLOW] = -np.inf
    return out


def log_le_modes(quench: Quench, grid: MomentumGrid, t) -> np.ndarray:
    """ln L_k(t) for every grid momentum, in grid order."""
    overlap_sq, eps_f = mode_data(quench, grid.momenta)
    return _log_modes(overlap_sq, eps_f, np.asarray([float(t)]))[0]


def _log_echo(overlap_sq, eps_f, times):
    n_k = max(1, eps_f.size)
    step = max(1, _CHUNK // n_k)
    out = np.empty(times.shape)
    for start in range(0, times.size, step):
        block = _log_modes(overlap_sq, eps_f, times[start:start + step])
        # a row holding -inf sums to -inf: the sentinel propagates
        out[start:start + step] = block.sum(axis=1)
    return out


def loschmidt_echo(quench: Quench, grid: MomentumGrid, t: float) -> float:
    """Full echo prod_k L_k(t); exactly 0.0 if any mode echo underflows."""
    if t < 0:
        raise ValueError("time must be non-negative")
    overlap_sq, eps_f = mode_data(quench, grid.momenta)
    total = _log_echo(overlap_sq, eps_f, np.asarray([float(t)]))[0]
    return 0.0 if total == -np.inf else math.exp(total)


def rate_function(quench: Quench, grid: MomentumGrid, times, with_le: bool = False) -> RateSeries:
    """lambda(t) = -(1/N) sum_k ln L_k(t), with N the number of unit cells."""
    times = _check_times(times)
    overlap_sq, eps_f = mode_data(quench, grid.momenta)
    log_echo = _log_echo(overlap_sq, eps_f, times)
    rate = -log_echo / grid.n_cells + 0.0  # no negative zero
    rate[log_echo == -np.inf] = np.inf
    le = np.exp(log_echo) if with_le else None
    meta = {**quench.describe(), **grid.describe()}
    return RateSeries(times, rate, le, meta)


def rate_at(quench: Quench, grid: MomentumGrid, t: float) -> float:
    """Rate function at a single time."""
    return float(rate_function(quench, grid, [t]).rate[0])


def _parabola_vertex(t0, t1, t2, y0, y1, y2):
    d1 = (y1 - y0) / (t1 - t0)
    d2 = (y2 - y1) / (t2 - t1)
    curv = (d2 - d1) / (t2 - t0)
    if curv >= 0:
        return t1, y1
    # y = y1 + b (t - t1) + curv (t - t1)^2 with b the centred slope
    b = d1 + curv * (t1 - t0)
    tv = t1 - b / (2.0 * curv)
    tv = min(max(tv, t0), t2)
    return tv, y1 + b * (tv - t1) + curv * (tv - t1) ** 2


def local_maxima(series: RateSeries):
    """Local maxima of a sampled series as a list of ``(t, lambda)``.

    A sample is a peak if it exceeds its left neighbour and is not below its
    right one.  Finite peaks are refined by the parabola through the three
    bracketing samples; infinite peaks are returned at the sampled time.
    """
    t, y = series.times, series.rate
    peaks = []
    if len(t) < 3:
        return peaks
    for i in range(1, len(t) - 1):
        if y[i] > y[i - 1] and y[i] >= y[i + 1]:
            if np.isinf(y[i]):
                peaks.append((float(t[i]), math.inf))
            else:
                tv, yv = _parabola_vertex(t[i - 1], t[i], t[i + 1], y[i - 1], y[i], y[i + 1])
                peaks.append((float(tv), float(max(yv, y[i]))))
    return peaks


def _rate_slope(overlap_sq, eps_f, n_cells, t):
    """d lambda / dt, or 0.0 where some mode echo vanishes."""
    lam = 1.0 - overlap_sq
    phase = eps_f * t
    s, c = np.sin(phase), np.cos(phase)
    le = c * c + overlap_sq * s * s
    if np.any(le <= UNDERFLOW):
        return 0.0
    return float(np.sum(lam * eps_f * np.sin(2.0 * phase) / le) / n_cells)


def refined_peaks(quench: Quench, grid: MomentumGrid, times):
    """Local maxima of lambda(t) on the sampled ``times``, refined.

    Each discrete maximum is refined by locating the sign change of the
    analytic slope between its neighbours.  The sign change is either a
    smooth maximum or the pole of an exact echo zero, and bracketing
    converges to either, so divergent peaks are not flattened by the
    sampling.  Returns a list of ``(t_peak, lambda_peak)``.
    """
    series = rate_function(quench, grid, times)
    t, y = series.times, series.rate
    overlap_sq, eps_f = mode_data(quench, grid.momenta)
    slope = lambda x: _rate_slope(overlap_sq, eps_f, grid.n_cells, x)
    peaks = []
    for i in range(1, len(t) - 1):
        if not (y[i] > y[i - 1] and y[i] >= y[i + 1]):
            continue
        if np.isinf(y[i]):
            peaks.append((float(t[i]), math.inf))
            continue
        lo, hi = t[i - 1], t[i + 1]
        if slope(lo) > 0 > slope(hi):
            tp = brentq(slope, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            yp = rate_at(quench, grid, tp)
            if yp >= y[i]:
                peaks.append((float(tp), float(yp)))
                continue
        tv, yv = _parabola_vertex(t[i - 1], t[i], t[i + 1], y[i - 1], y[i], y[i + 1])
        peaks.append((float(tv), float(max(yv, y[i]))))
    return peaks


def first_peak(quench: Quench, grid: MomentumGrid, times):
    """First refined local maximum ``(t, lambda)``, or None."""
    peaks = refined_peaks(quench, grid, times)
    return peaks[0] if peaks else None


def _window_times(time_window, n_times):
    t0, t1 = time_window
    if not 0 <= t0 < t1:
        raise ValueError(f"bad time window {time_window}")
    return np.linspace(t0, t1, int(n_times) + 1)


def resize(quench: Quench, L: int) -> Quench:
    """Quench adapted to a ring of L cells (only the long-range model cares)."""
    if isinstance(quench.initial, LongRangeSSH):
        if L % 2:
            raise ValueError(f"long-range SSH needs an even number of cells, got L={L}")
        return Quench(
            dataclasses.replace(quench.initial, half_range=L // 2),
            dataclasses.replace(quench.final, half_range=L // 2),
        )
    return quench


def _twisted_flux(dims, phi, axis):
    if dims == 1:
        return phi
    if axis == "x":
        return (phi, 0.0)
    if axis == "y":
        return (0.0, phi)
    if axis == "both":
        return (phi, phi)
    raise ValueError(f"twist axis must be 'x', 'y' or 'both', got {axis!r}")


def lambda_max_vs_flux(
    quench: Quench,
    L,
    fluxes: Sequence[float],
    time_window=(0.0, 10.0),
    n_times: int = 4000,
    axis: str = "x",
    peak: str = "first",
):
    """Peak height lambda_max of the rate function for each flux value.

    ``peak='first'`` takes the first local maximum in the window;
    ``peak='largest'`` the highest one, which is what exposes every critical
    flux when several critical pairs give peaks at different times (Creutz).
    For the 2D model ``L`` is (L_x, L_y) and ``axis`` selects the twisted
    direction.  Fluxes with no maximum inside the window map to NaN.
    """
    if peak not in ("first", "largest"):
        raise ValueError(f"peak must be 'first' or 'largest', got {peak!r}")
    times = _window_times(time_window, n_times)
    out = []
    for phi in fluxes:
        grid = make_grid(quench.dims, L, _twisted_flux(quench.dims, float(phi), axis))
        peaks = refined_peaks(quench, grid, times)
        if not peaks:
            value = math.nan
        elif peak == "first":
            value = peaks[0][1]
        else:
            value = max(p[1] for p in peaks)
        out.append((float(phi), value))
    return out


def size_sweep(quench: Quench, sizes, phi: float = 0.0, time_window=(0.0, 4.0), n_times: int = 4000):
    """First-peak time and height for each ring size, as ``(L, t1, lambda_max)``.

    Sizes without a maximum in the window give NaN entries.
    """
    if quench.dims != 1:
        raise ValueError("size sweeps are defined for 1D models")
    times = _window_times(time_window, n_times)
    out = []
    for L in sizes:
        if L < 4:
            raise ValueError(f"sizes must be >= 4, got {L}")
        q = resize(quench, int(L))
        peak = first_peak(q, make_grid(1, int(L), phi), times)
        t1, lm = (math.nan, math.nan) if peak is None else peak
        out.append((int(L), t1, lm))
    return out
