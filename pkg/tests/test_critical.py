import math

import numpy as np
import pytest

from dqpt.band_models import Quench, band_energy, le_mode
from dqpt.critical import (
    asymptotic_le,
    constraint_residual,
    critical_flux,
    critical_set,
    critical_times,
    qwz_critical_pairs,
    qwz_t1_interval,
    scan_roots,
    solve_critical_momenta,
)
from dqpt.errors import DegenerateModeError, NoCriticalMomentumError, NotAvailableError
from dqpt.loschmidt import loschmidt_echo, make_grid

N_DRAWS = 500
PI = math.pi


def _random_cross_ssh(rng):
    gi = rng.choice([-1, 1]) * rng.uniform(1.05, 3.0)
    gf = rng.choice([-1, 1]) * rng.uniform(0.0, 0.95)
    if rng.random() < 0.5:
        gi, gf = gf, gi
    return gi, gf


def _random_cross_creutz(rng):
    ti = rng.uniform(0.05, PI / 2)
    tf = -rng.uniform(0.05, PI / 2)
    if rng.random() < 0.5:
        ti, tf = tf, ti
    return ti, tf, rng.uniform(0.0, 0.95)


# ---- examples --------------------------------------------------------------

def test_ssh_reference_quench():
    cs = critical_set(Quench.ssh(1.5, 0.5), 20, n_max=2)
    [p] = cs.pairs
    assert p.k_c / PI == pytest.approx(0.839, abs=1e-3)
    assert p.phi_c / PI == pytest.approx(0.783, abs=1e-3)
    assert p.t_star[0] == pytest.approx(2.565, abs=2e-3)
    assert p.t_star[1] == pytest.approx(7.695, abs=5e-3)
    assert p.epsilon_f == pytest.approx(math.sqrt(0.375), abs=1e-12)


def test_ssh_same_phase_is_empty():
    assert solve_critical_momenta(Quench.ssh(1.5, 1.2)) == []
    assert len(critical_set(Quench.ssh(0.3, 0.8), 20)) == 0


def test_ssh_opposite_gamma_is_rejected():
    with pytest.raises(NoCriticalMomentumError):
        solve_critical_momenta(Quench.ssh(1.5, -1.5))


def test_creutz_reference_quench():
    cs = critical_set(Quench.creutz(0.4, -0.4, 0.5), 20, n_max=2)
    k = [p.k_c / PI for p in cs]
    phi = [p.phi_c / PI for p in cs]
    assert k == pytest.approx([0.536, 0.772], abs=1e-3)
    assert phi == pytest.approx([0.721, 0.550], abs=1e-3)
    assert cs.pairs[0].t_star == pytest.approx([1.435, 4.306], abs=5e-3)
    assert cs.pairs[1].t_star == pytest.approx([2.176, 6.527], abs=5e-3)


def test_long_range_reference_quench():
    cs = critical_set(Quench.long_range(1.5, 0.5, 1.0, 20), 20)
    [p] = cs.pairs
    assert p.k_c / PI == pytest.approx(0.676, abs=2e-3)
    assert p.phi_c / PI == pytest.approx(0.487, abs=2e-3)
    assert p.t_star == pytest.approx([3.163, 9.490], abs=1e-2)
    assert abs(constraint_residual(Quench.long_range(1.5, 0.5, 1.0, 20), 0.676 * PI)) < 2e-2


def test_long_range_short_decay_recovers_ssh():
    cs = critical_set(Quench.long_range(1.5, 0.5, 10.0, 20), 20)
    [p] = cs.pairs
    assert p.phi_c / PI == pytest.approx(0.782, abs=2e-3)
    assert p.t_star == pytest.approx([2.565, 7.696], abs=5e-3)


def test_long_range_size_mismatch():
    with pytest.raises(ValueError):
        critical_set(Quench.long_range(1.5, 0.5, 1.0, 20), 40)


def test_critical_flux_examples():
    assert critical_flux(PI / 2, 4) == 0.0
    assert critical_flux(PI / 2, 2) == pytest.approx(PI)
    with pytest.raises(ValueError):
        critical_flux(1.0, 1)


def test_critical_times_formula():
    q = Quench.ssh(1.5, 0.5)
    k = solve_critical_momenta(q)[0]
    eps = band_energy(q.final, k)
    assert critical_times(q, k, 3) == [PI * (2 * n - 1) / (2 * eps) for n in (1, 2, 3)]


def test_constraint_residual_examples():
    q = Quench.ssh(1.5, 0.5)
    assert abs(constraint_residual(q, 0.839 * PI)) < 1e-3
    assert abs(constraint_residual(q, solve_critical_momenta(q)[0])) < 1e-10
    same = Quench.ssh(0.7, 0.7)
    assert constraint_residual(same, 0.4) == pytest.approx(band_energy(same.final, 0.4) ** 2)


def test_scan_roots_polynomial():
    roots = scan_roots(lambda x: (x - 0.3) * (x - 1.7) * (x - 2.9), 0.0, PI, panels=100)
    assert roots == pytest.approx([0.3, 1.7, 2.9], abs=1e-12)
    assert scan_roots(lambda x: x * x + 1, -1, 1) == []


# ---- invariants ------------------------------------------------------------

def test_closed_form_matches_numeric_ssh():
    rng = np.random.default_rng(31)
    for _ in range(N_DRAWS):
        gi, gf = _random_cross_ssh(rng)
        q = Quench.ssh(gi, gf)
        closed = solve_critical_momenta(q)
        numeric = solve_critical_momenta(q, method="numeric")
        assert len(closed) == len(numeric) == 1
        assert numeric[0] == pytest.approx(closed[0], abs=1e-10)
        assert abs(constraint_residual(q, closed[0])) < 1e-10


def test_closed_form_matches_numeric_creutz():
    rng = np.random.default_rng(32)
    for _ in range(N_DRAWS):
        ti, tf, jv = _random_cross_creutz(rng)
        q = Quench.creutz(ti, tf, jv)
        closed = solve_critical_momenta(q)
        numeric = solve_critical_momenta(q, method="numeric")
        assert len(closed) == len(numeric) == 2
        assert numeric == pytest.approx(closed, abs=1e-10)
        for k in closed:
            assert abs(constraint_residual(q, k)) < 1e-10


def test_energy_closed_forms():
    rng = np.random.default_rng(33)
    for _ in range(N_DRAWS):
        gi, gf = _random_cross_ssh(rng)
        q = Quench.ssh(gi, gf)
        [k] = solve_critical_momenta(q)
        closed = math.sqrt((1 - gf**2) * (gi - gf) / (gi + gf))
        assert band_energy(q.final, k) == pytest.approx(closed, abs=1e-12)
        ti, tf, jv = _random_cross_creutz(rng)
        q = Quench.creutz(ti, tf, jv)
        for k in solve_critical_momenta(q):
            closed = 2 * math.sqrt((math.sin(tf) - math.sin(ti)) * math.sin(tf) * math.sin(k) ** 2)
            assert band_energy(q.final, k) == pytest.approx(closed, abs=1e-12)


def test_cross_phase_iff_solvable_ssh():
    rng = np.random.default_rng(34)
    for _ in range(2000):
        gi, gf = rng.uniform(-3, 3, 2)
        if abs(abs(gi) - 1) < 1e-6 or abs(abs(gf) - 1) < 1e-6 or abs(gi + gf) < 1e-9:
            continue
        roots = solve_critical_momenta(Quench.ssh(gi, gf))
        assert bool(roots) == ((abs(gi) - 1) * (abs(gf) - 1) < 0)


def test_cross_phase_iff_solvable_creutz():
    rng = np.random.default_rng(35)
    for _ in range(2000):
        ti, tf = rng.uniform(-PI / 2, PI / 2, 2)
        jv = rng.uniform(0, 0.95)
        roots = solve_critical_momenta(Quench.creutz(ti, tf, jv))
        assert bool(roots) == (math.sin(ti) * math.sin(tf) < 0)


def test_residual_of_long_range_roots():
    rng = np.random.default_rng(36)
    for _ in range(50):
        L = 2 * int(rng.integers(3, 12))
        q = Quench.long_range(rng.uniform(1.1, 2.0), rng.uniform(0.0, 0.9), rng.uniform(0.5, 5.0), L)
        for k in solve_critical_momenta(q):
            assert abs(constraint_residual(q, k)) < 1e-10


def test_flux_grid_contains_critical_momentum():
    rng = np.random.default_rng(37)
    for i in range(N_DRAWS):
        L = int(rng.integers(4, 200))
        if i % 2:
            q = Quench.ssh(*_random_cross_ssh(rng))
        else:
            q = Quench.creutz(*_random_cross_creutz(rng))
        for p in critical_set(q, L).pairs:
            assert 0.0 <= p.phi_c <= PI
            g = make_grid(1, L, p.phi_c if p.phi_c < 2 * PI else 0.0)
            dist = np.abs(np.angle(np.exp(1j * (g.momenta[:, None] - np.array([p.k_c, -p.k_c])))))
            assert dist.min() < 1e-12
            if p.t_star[0] < 200:
                assert loschmidt_echo(q, g, p.t_star[0]) <= 1e-12


def test_asymptotic_le_ratios():
    cases = [(Quench.ssh(1.5, 0.5), 0), (Quench.creutz(0.4, -0.4, 0.5), 0), (Quench.creutz(0.4, -0.4, 0.5), 1)]
    for q, idx in cases:
        p = critical_set(q, 20).pairs[idx]
        assert asymptotic_le(q, p.k_c, p.t_star[0], 20, 0.0) == 0.0
        for delta, tol in ((1e-4, 0.01), (1e-2, 0.10)):
            ratio = asymptotic_le(q, p.k_c, p.t_star[0], 20, delta) / le_mode(q, p.k_c + delta / 20, p.t_star[0])
            assert abs(ratio - 1) < tol


def test_asymptotic_le_unsupported_model():
    q = Quench.long_range(1.5, 0.5, 1.0, 20)
    with pytest.raises(NotAvailableError):
        asymptotic_le(q, 2.0, 3.0, 20, 1e-3)


# ---- QWZ -------------------------------------------------------------------

def test_qwz_sixteen_pairs():
    q = Quench.qwz(0.3, -0.9)
    cs = qwz_critical_pairs(q, 12, 12, "either")
    assert len(cs) == 16
    xs = [p for p in cs if p.axis == "x"]
    assert len(xs) == 8
    found = {(round(p.k_c[0] / PI, 3), round(p.k_c[1] / PI, 3)) for p in xs}
    for k in [(0.146, -1.0), (-0.146, -1.0), (0.085, 0.833), (-0.085, -0.833), (0.799, 0.0), (-0.799, 0.0)]:
        assert any(abs(a - k[0]) < 2e-3 and abs(b - k[1]) < 2e-3 for a, b in found)
    fluxes = sorted({round(p.phi_c / PI, 4) for p in cs})
    assert fluxes == pytest.approx([0.2438, 0.4122, 0.9814], abs=2e-3)
    t1 = sorted({round(p.t_star[0], 4) for p in cs})
    assert t1 == pytest.approx([1.431, 1.602, 1.705], abs=5e-3)
    for p in cs:
        assert p.t_star[1] == pytest.approx(3 * p.t_star[0], rel=1e-14)


def test_qwz_interval_contains_all_pairs():
    q = Quench.qwz(0.3, -0.9)
    lo, hi = qwz_t1_interval(q)
    assert (lo, hi) == pytest.approx((1.431, 1.705), abs=1e-3)
    cs = qwz_critical_pairs(q, 12, 12, "both", n_continuum=257)
    assert len(cs) > 0
    for p in list(cs) + list(qwz_critical_pairs(q, 12, 12)):
        assert lo - 1e-9 <= p.t_star[0] <= hi + 1e-9
        assert abs(constraint_residual(q, p.k_c)) < 1e-10


def test_qwz_interval_random_regimes():
    rng = np.random.default_rng(38)
    for _ in range(N_DRAWS):
        q = Quench.qwz(rng.uniform(0.05, 1.95), -rng.uniform(0.05, 1.95))
        L = int(rng.integers(3, 16))
        lo, hi = qwz_t1_interval(q)
        for p in qwz_critical_pairs(q, L, L):
            assert lo - 1e-9 <= p.t_star[0] <= hi + 1e-9
            assert abs(constraint_residual(q, p.k_c)) < 1e-10


def test_qwz_same_phase_is_empty():
    cs = qwz_critical_pairs(Quench.qwz(0.3, 0.1), 12, 12)
    assert len(cs) == 0
    assert cs.metadata["t1_interval"] is None


def test_qwz_twisted_grid_vanishes_at_pair_time():
    q = Quench.qwz(0.3, -0.9)
    for p in qwz_critical_pairs(q, 12, 12):
        flux = (p.phi_c, 0.0) if p.axis == "x" else (0.0, p.phi_c)
        assert loschmidt_echo(q, make_grid(2, (12, 12), flux), p.t_star[0]) <= 1e-12


def test_qwz_rejects_1d_solver_and_bad_axis():
    with pytest.raises(ValueError):
        solve_critical_momenta(Quench.qwz(0.3, -0.9))
    with pytest.raises(ValueError):
        qwz_critical_pairs(Quench.qwz(0.3, -0.9), 12, 12, "z")


def test_gapless_critical_time():
    with pytest.raises(DegenerateModeError):
        critical_times(Quench.ssh(0.5, 1.0), PI)


def test_as_dict_serialisable():
    d = critical_set(Quench.ssh(1.5, 0.5), 20).as_dict()
    assert d["pairs"][0]["k_c_over_pi"] == pytest.approx(0.839, abs=1e-3)
    assert d["metadata"]["L"] == 20
