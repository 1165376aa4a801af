"""Two-band Bloch Hamiltonians and the per-mode quench quantities.

Every model is written as

    h(k) = d_x(k) sigma_x + d_y(k) sigma_y + d_z(k) sigma_z + d_0(k) I

and a quench is a sudden change of one driving parameter.  The identity
term d_0 only contributes a phase to each mode, so it never enters the
Loschmidt echo.

Energy units: J_1 = 1 for the SSH family, J = 1 for the Creutz ladder.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar, Union

import numpy as np

from .errors import DegenerateModeError

__all__ = [
    "DVector",
    "SSH",
    "Creutz",
    "LongRangeSSH",
    "QWZ",
    "CustomModel",
    "ModelSpec",
    "Quench",
    "d_vector",
    "band_energy",
    "inner_product",
    "lambda_k",
    "le_mode",
    "mode_data",
]

#: modes with |d| below this are treated as gapless
GAP_TOL = 1e-14


@dataclass(frozen=True)
class DVector:
    """Pauli components of h(k) at a single momentum."""

    dx: float
    dy: float
    dz: float
    d0: float

    def __post_init__(self):
        for name in ("dx", "dy", "dz", "d0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite d-vector component {name}")

    def energy(self) -> float:
        return math.sqrt(self.dx**2 + self.dy**2 + self.dz**2)


class _TwoBand:
    """Common surface of the model dataclasses.

    ``components(k)`` is vectorized: for 1D models ``k`` is any array of
    momenta, for 2D models the last axis has length 2 and holds (k_x, k_y).
    """

    dims: ClassVar[int] = 1
    driving: ClassVar[str] = ""

    def components(self, k):
        raise NotImplementedError

    def with_driving(self, value):
        return dataclasses.replace(self, **{self.driving: value})


@dataclass(frozen=True)
class SSH(_TwoBand):
    """Su-Schrieffer-Heeger chain with gamma = J_2/J_1."""

    gamma: float
    driving: ClassVar[str] = "gamma"

    def components(self, k):
        k = np.asarray(k, dtype=float)
        zero = np.zeros_like(k)
        return (1.0 + self.gamma * np.cos(k), -self.gamma * np.sin(k), zero, zero)


@dataclass(frozen=True)
class Creutz(_TwoBand):
    """Creutz ladder with J_h = J_d = 1, plaquette flux ``theta`` and
    ``jv_tilde`` = J_v / 2J."""

    theta: float
    jv_tilde: float = 0.5
    driving: ClassVar[str] = "theta"

    def __post_init__(self):
        if abs(self.theta) > math.pi / 2 + 1e-12:
            raise ValueError(f"theta must lie in [-pi/2, pi/2], got {self.theta}")
        if not 0.0 <= self.jv_tilde < 1.0:
            raise ValueError(f"jv_tilde must lie in [0, 1), got {self.jv_tilde}")

    def components(self, k):
        k = np.asarray(k, dtype=float)
        c, s = np.cos(k), np.sin(k)
        dx = -2.0 * c - 2.0 * self.jv_tilde
        dz = -2.0 * s * math.sin(self.theta)
        d0 = -2.0 * c * math.cos(self.theta)
        return dx, np.zeros_like(k), dz, d0


@dataclass(frozen=True)
class LongRangeSSH(_TwoBand):
    """SSH chain with exponentially decaying hoppings V_{n,r} = J_n e^{-alpha(r-1)}.

    Sums run over r = 1 .. half_range, with half_range = L/2 for a chain of
    L cells, so the Bloch components depend on the system size.
    """

    j2: float
    alpha: float = 1.0
    half_range: int = 10
    j1: float = 1.0
    j3: float = 0.0
    j4: float = 0.0
    driving: ClassVar[str] = "j2"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if int(self.half_range) != self.half_range or self.half_range < 1:
            raise ValueError(f"half_range must be a positive integer, got {self.half_range}")

    def components(self, k):
        k = np.asarray(k, dtype=float)
        r = np.arange(1, int(self.half_range) + 1, dtype=float)
        decay = np.exp(-self.alpha * (r - 1.0))
        kr = np.multiply.outer(k, r)
        kr1 = np.multiply.outer(k, r - 1.0)
        v1, v2 = self.j1 * decay, self.j2 * decay
        dx = np.cos(kr1) @ v1 + np.cos(kr) @ v2
        dy = np.sin(kr1) @ v1 - np.sin(kr) @ v2
        dz = np.cos(kr) @ ((self.j3 - self.j4) * decay)
        d0 = np.cos(kr) @ ((self.j3 + self.j4) * decay)
        return dx, dy, dz, d0


@dataclass(frozen=True)
class QWZ(_TwoBand):
    """Qi-Wu-Zhang Chern insulator on the square lattice."""

    mu: float
    dims: ClassVar[int] = 2
    driving: ClassVar[str] = "mu"

    def components(self, k):
        k = np.asarray(k, dtype=float)
        kx, ky = k[..., 0], k[..., 1]
        dz = -np.cos(kx) - np.cos(ky) - self.mu
        return np.sin(ky), -np.sin(kx), dz, np.full_like(kx, -2.0 * self.mu)


@dataclass(frozen=True)
class CustomModel(_TwoBand):
    """Model defined by a raw callback ``fn(k) -> (dx, dy, dz, d0)``.

    Intended for tests and quick experiments; two custom models always
    form a valid quench.
    """

    fn: Callable = field(compare=False)
    ndim: int = 1
    label: str = "custom"

    @property
    def dims(self):
        return self.ndim

    def components(self, k):
        k = np.asarray(k, dtype=float)
        parts = self.fn(k)
        shape = k.shape[:-1] if self.ndim == 2 else k.shape
        return tuple(np.broadcast_to(np.asarray(p, dtype=float), shape) for p in parts)


ModelSpec = Union[SSH, Creutz, LongRangeSSH, QWZ, CustomModel]


def _model_name(model) -> str:
    if isinstance(model, CustomModel):
        return model.label
    return type(model).__name__


@dataclass(frozen=True)
class Quench:
    """Pre- and postquench models differing only in the driving parameter."""

    initial: ModelSpec
    final: ModelSpec

    def __post_init__(self):
        if type(self.initial) is not type(self.final):
            raise ValueError(
                f"quench endpoints must be the same model, got "
                f"{_model_name(self.initial)} and {_model_name(self.final)}"
            )
        if isinstance(self.initial, CustomModel):
            if self.initial.dims != self.final.dims:
                raise ValueError("custom quench endpoints differ in dimension")
            return
        driving = self.initial.driving
        for f in dataclasses.fields(self.initial):
            if f.name == driving:
                continue
            if getattr(self.initial, f.name) != getattr(self.final, f.name):
                raise ValueError(
                    f"quench endpoints may differ only in {driving!r}, "
                    f"but {f.name!r} differs"
                )

    @property
    def dims(self) -> int:
        return self.initial.dims

    @property
    def model(self) -> str:
        return _model_name(self.initial)

    @classmethod
    def ssh(cls, gamma_i, gamma_f):
        return cls(SSH(gamma_i), SSH(gamma_f))

    @classmethod
    def creutz(cls, theta_i, theta_f, jv_tilde=0.5):
        return cls(Creutz(theta_i, jv_tilde), Creutz(theta_f, jv_tilde))

    @classmethod
    def long_range(cls, j2_i, j2_f, alpha, L, j1=1.0, j3=0.0, j4=0.0):
        if L % 2:
            raise ValueError(f"long-range SSH needs an even number of cells, got L={L}")
        common = dict(alpha=alpha, half_range=L // 2, j1=j1, j3=j3, j4=j4)
        return cls(LongRangeSSH(j2_i, **common), LongRangeSSH(j2_f, **common))

    @classmethod
    def qwz(cls, mu_i, mu_f):
        return cls(QWZ(mu_i), QWZ(mu_f))

    def describe(self) -> dict:
        """Flat, JSON-friendly description of both endpoints."""
        if isinstance(self.initial, CustomModel):
            return {"model": self.model}
        out = {"model": self.model}
        for f in dataclasses.fields(self.initial):
            if f.name == self.initial.driving:
                out[f.name + "_i"] = getattr(self.initial, f.name)
                out[f.name + "_f"] = getattr(self.final, f.name)
            else:
                out[f.name] = getattr(self.initial, f.name)
        return out


def _is_pair(k) -> bool:
    return np.ndim(k) == 1 and np.shape(k)[0] == 2


def d_vector(model: ModelSpec, k) -> DVector:
    """Bloch components of ``model`` at a single momentum.

    ``k`` must be a scalar for 1D models and a (k_x, k_y) pair for QWZ.
    """
    if model.dims == 2:
        if not _is_pair(k):
            raise ValueError(f"{_model_name(model)} needs a (k_x, k_y) pair, got {k!r}")
    elif np.ndim(k) != 0:
        raise ValueError(f"{_model_name(model)} needs a scalar momentum, got {k!r}")
    dx, dy, dz, d0 = model.components(k)
    return DVector(float(dx), float(dy), float(dz), float(d0))


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def band_energy(model: ModelSpec, k):
    """Upper-band energy |d(k)|; d_0 is excluded."""
    dx, dy, dz, _ = model.components(k)
    return _scalar_or_array(np.sqrt(dx * dx + dy * dy + dz * dz))


def inner_product(quench: Quench, k):
    """sum_alpha d_alpha(initial, k) d_alpha(final, k) over alpha = x, y, z."""
    ix, iy, iz, _ = quench.initial.components(k)
    fx, fy, fz, _ = quench.final.components(k)
    return _scalar_or_array(ix * fx + iy * fy + iz * fz)


def mode_data(quench: Quench, k):
    """Per-mode arrays ``(overlap_sq, eps_f)`` for a batch of momenta.

    ``overlap_sq`` is the squared cosine between the pre- and postquench
    d-vectors, i.e. 1 - Lambda_k.  Raises DegenerateModeError if any mode
    is gapless in either Hamiltonian.
    """
    ix, iy, iz, _ = quench.initial.components(k)
    fx, fy, fz, _ = quench.final.components(k)
    eps_i = np.sqrt(ix * ix + iy * iy + iz * iz)
    eps_f = np.sqrt(fx * fx + fy * fy + fz * fz)
    if np.any(eps_i <= GAP_TOL) or np.any(eps_f <= GAP_TOL):
        bad = np.asarray(k)[(eps_i <= GAP_TOL) | (eps_f <= GAP_TOL)]
        raise DegenerateModeError(f"gapless mode(s) at k = {np.ravel(bad)[:4]}")
    cos = (ix * fx + iy * fy + iz * fz) / (eps_i * eps_f)
    return np.minimum(cos * cos, 1.0), eps_f


def lambda_k(quench: Quench, k):
    """Oscillation amplitude Lambda_k of the mode echo, in [0, 1].

    Lambda_k = 1 exactly when the pre- and postquench d-vectors are
    orthogonal, which is what produces an exact zero of the echo.
    """
    overlap_sq, _ = mode_data(quench, k)
    lam = 1.0 - overlap_sq
    # only rounding-level excursions are clamped
    lam = np.where((lam < 0) & (lam > -1e-15), 0.0, lam)
    return _scalar_or_array(lam)


def le_mode(quench: Quench, k, t):
    """Mode echo L_k(t) = 1 - Lambda_k sin^2(eps_f t).

    Evaluated as cos^2(eps_f t) + (1 - Lambda_k) sin^2(eps_f t), which is
    the same quantity without cancellation near its zeros.
    """
    if np.any(np.asarray(t) < 0):
        raise ValueError("time must be non-negative")
    overlap_sq, eps_f = mode_data(quench, k)
    phase = eps_f * t
    s = np.sin(phase)
    c = np.cos(phase)
    return _scalar_or_array(c * c + overlap_sq * s * s)
