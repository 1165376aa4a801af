"""Exact diagonalization of the interacting SSH ring with a boundary flux.

    H = sum_j (J1 c+_{jA} c_{jB} + J2 c+_{jB} c_{j+1,A} + h.c.)
        + U sum_j (n_{jA} n_{jB} + n_{jB} n_{j+1,A})

with the last intercell bond carrying the twist, J2 e^{-i phi} c+_{LB} c_{1A}.
Sites are ordered (1A, 1B, 2A, 2B, ...), so sublattice A of cell j sits on
bit 2(j-1) and B on bit 2(j-1)+1.  Fermionic signs follow the Jordan-Wigner
string in that order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import BasisTooLargeError, GroundStateDegeneracyError
from .loschmidt import RateSeries, UNDERFLOW, _check_times

__all__ = [
    "FockBasis",
    "ManyBodyOperator",
    "EDQuench",
    "build_basis",
    "bonds",
    "one_body_matrix",
    "build_hamiltonian",
    "hermitian_eigh",
    "ground_state",
    "evolve",
    "ed_amplitude",
    "ed_rate_function",
]

DEFAULT_MAX_DIM = 20_000
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class FockBasis:
    """Occupation-number states with a fixed particle count, as ascending bit patterns."""

    n_sites: int
    n_particles: int
    states: tuple
    index: dict = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)


def build_basis(l_cells: int, n_particles: int, max_dim: int = DEFAULT_MAX_DIM) -> FockBasis:
    n_sites = 2 * l_cells
    if not 0 <= n_particles <= n_sites:
        raise ValueError(f"need 0 <= n_particles <= {n_sites}, got {n_particles}")
    dim = math.comb(n_sites, n_particles)
    if dim > max_dim:
        raise BasisTooLargeError(f"Fock dimension {dim} exceeds the cap {max_dim}")
    states = sorted(sum(1 << i for i in occ) for occ in combinations(range(n_sites), n_particles))
    return FockBasis(n_sites, n_particles, tuple(states), {s: i for i, s in enumerate(states)})


@dataclass(frozen=True)
class ManyBodyOperator:
    matrix: np.ndarray = field(repr=False)
    basis: FockBasis

    def hermiticity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


@dataclass(frozen=True)
class EDQuench:
    """Quench of the intercell hopping J2 at fixed J1, U and flux (radians)."""

    l_cells: int
    u: float
    j2_initial: float
    j2_final: float
    phi: float = 0.0
    j1: float = 1.0

    def __post_init__(self):
        if self.l_cells < 2:
            raise ValueError(f"need at least 2 cells, got {self.l_cells}")
        if self.u < 0:
            raise ValueError(f"U must be non-negative, got {self.u}")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError(f"flux must lie in [0, 2pi), got {self.phi}")

    def describe(self) -> dict:
        return {
            "model": "interacting SSH",
            "L": self.l_cells,
            "U": self.u,
            "J1": self.j1,
            "J2_i": self.j2_initial,
            "J2_f": self.j2_final,
            "flux": self.phi,
        }


def bonds(l_cells: int, j1: float, j2: float, phi: float):
    """Hopping terms as ``(a, b, amplitude)`` meaning amplitude c+_a c_b (+ h.c.)."""
    out = []
    n = 2 * l_cells
    for j in range(l_cells):
        a, b = 2 * j, 2 * j + 1
        out.append((a, b, complex(j1)))
        amp = j2 * np.exp(-1j * phi) if j == l_cells - 1 else complex(j2)
        out.append((b, (2 * j + 2) % n, amp))
    return out


def one_body_matrix(l_cells: int, j1: float, j2: float, phi: float) -> np.ndarray:
    """Single-particle Hamiltonian h with H = sum_ab h_ab c+_a c_b at U = 0."""
    h = np.zeros((2 * l_cells, 2 * l_cells), dtype=complex)
    for a, b, amp in bonds(l_cells, j1, j2, phi):
        h[a, b] += amp
        h[b, a] += np.conj(amp)
    return h


def _hop(state, a, b):
    """c+_a c_b |state> as ``(new_state, sign)``, or None if it vanishes."""
    if not (state >> b) & 1:
        return None
    if a == b:
        return state, 1
    if (state >> a) & 1:
        return None
    lo, hi = (a, b) if a < b else (b, a)
    between = state & (((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1))
    sign = -1 if bin(between).count("1") % 2 else 1
    return state ^ (1 << b) ^ (1 << a), sign


def build_hamiltonian(quench: EDQuench, basis: FockBasis, stage: str = "initial") -> ManyBodyOperator:
    """Dense Hamiltonian at the pre- (``stage='initial'``) or postquench J2."""
    if basis.n_sites != 2 * quench.l_cells:
        raise ValueError(f"basis has {basis.n_sites} sites, model needs {2 * quench.l_cells}")
    if stage not in ("initial", "final"):
        raise ValueError(f"stage must be 'initial' or 'final', got {stage!r}")
    j2 = quench.j2_initial if stage == "initial" else quench.j2_final
    n = basis.n_sites
    hops = []
    for a, b, amp in bonds(quench.l_cells, quench.j1, j2, quench.phi):
        hops.append((a, b, amp))
        hops.append((b, a, np.conj(amp)))
    pairs = [(i, (i + 1) % n) for i in range(n)]
    H = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, s in enumerate(basis.states):
        H[col, col] = quench.u * sum((s >> i) & (s >> j) & 1 for i, j in pairs)
        for a, b, amp in hops:
            hit = _hop(s, a, b)
            if hit is not None:
                H[basis.index[hit[0]], col] += hit[1] * amp
    return ManyBodyOperator(H, basis)


def hermitian_eigh(matrix: np.ndarray):
    """Full eigendecomposition of a dense Hermitian matrix, ascending.

    Backed by LAPACK; every eigenpair is checked against the residual bound
    ||H v - E v|| <= 1e-10 * max|H| * dim.
    """
    matrix = np.asarray(matrix)
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    if matrix.size and np.max(np.abs(matrix - matrix.conj().T)) > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian")
    energies, vectors = np.linalg.eigh(matrix)
    if matrix.size:
        resid = np.linalg.norm(matrix @ vectors - vectors * energies, axis=0)
        bound = 1e-10 * scale * matrix.shape[0]
        if np.max(resid) > bound:
            raise ArithmeticError(f"eigen-residual {np.max(resid):.3g} exceeds {bound:.3g}")
    return energies, vectors


def ground_state(H: ManyBodyOperator):
    """Lowest eigenpair ``(E0, vector)``; degenerate ground states are an error."""
    energies, vectors = hermitian_eigh(H.matrix)
    if len(energies) > 1 and energies[1] - energies[0] < DEGENERACY_TOL:
        raise GroundStateDegeneracyError(
            f"ground state is degenerate (gap {energies[1] - energies[0]:.3g}); "
            "shift the flux by ~1e-8 to lift it"
        )
    return float(energies[0]), vectors[:, 0]


def _spectral_weights(quench: EDQuench):
    basis = build_basis(quench.l_cells, quench.l_cells)
    _, psi = ground_state(build_hamiltonian(quench, basis, "initial"))
    energies, vectors = hermitian_eigh(build_hamiltonian(quench, basis, "final").matrix)
    return psi, energies, vectors, vectors.conj().T @ psi


def evolve(quench: EDQuench, times):
    """Half-filled initial ground state evolved under the postquench
    Hamiltonian; returns ``(psi0, states)`` with one row per time."""
    psi, energies, vectors, coeff = _spectral_weights(quench)
    phases = np.exp(-1j * np.multiply.outer(np.asarray(times, dtype=float), energies))
    return psi, (phases * coeff) @ vectors.T


def ed_amplitude(quench: EDQuench, times) -> np.ndarray:
    """Return amplitude <psi_i| e^{-i H_f t} |psi_i> from the full spectrum."""
    _, energies, _, coeff = _spectral_weights(quench)
    weights = np.abs(coeff) ** 2
    return np.exp(-1j * np.multiply.outer(np.asarray(times, dtype=float), energies)) @ weights


def ed_rate_function(quench: EDQuench, times) -> RateSeries:
    """Rate function -(1/L) ln |<psi_i|psi(t)>|^2 with L the number of cells."""
    times = _check_times(times)
    le = np.abs(ed_amplitude(quench, times)) ** 2
    le = np.minimum(le, 1.0)
    with np.errstate(divide="ignore"):
        rate = -np.log(le) / quench.l_cells
    rate[le <= UNDERFLOW] = np.inf
    rate = np.maximum(rate, 0.0)
    return RateSeries(times, rate, le, quench.describe())
