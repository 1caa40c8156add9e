from dataclasses import replace

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavity_leak.dynamics import (SingularGeneratorError, emission_rates, evolve,
                                  exact_evolution, steady_state)
from cavity_leak.model import (MU1, MU2, VACUUM, MomentVector, SystemParams,
                               build_generator, build_rwa_generator, rb_chip_cavity)


def mp_steady(gen, dps=50):
    """Stationary moments in 50-digit arithmetic, as an independent reference."""
    with mpmath.workdps(dps):
        A = mpmath.matrix([[mpmath.mpf(float(a)) for a in row] for row in gen.A])
        b = mpmath.matrix([-mpmath.mpf(float(v)) for v in gen.b])
        x = mpmath.lu_solve(A, b)
        return np.array([float(v) for v in x])


def test_vacuum_is_not_stationary(scaled):
    # counter-rotating terms pump the vacuum
    gen = build_generator(scaled)
    traj = evolve(gen, t_end=1.0, n_samples=11)
    assert traj.column("mu1")[-1] > 0
    np.testing.assert_array_equal(traj.states[0], np.zeros(10))


def test_matches_matrix_exponential(scaled):
    gen = build_generator(scaled)
    times = np.linspace(0, 6, 61)
    traj = evolve(gen, times=times)
    ref = exact_evolution(gen, VACUUM, times)
    np.testing.assert_allclose(traj.states, ref, atol=1e-11)


def test_arbitrary_initial_state(scaled):
    gen = build_generator(scaled)
    x0 = np.random.default_rng(3).normal(size=10)
    times = np.linspace(0, 3, 7)
    np.testing.assert_allclose(evolve(gen, x0, times=times).states,
                               exact_evolution(gen, x0, times), atol=1e-10)


def test_transient_oscillation_and_relaxation(scaled):
    gen = build_generator(scaled)
    ss = steady_state(gen, scaled)
    t_end = 50 / scaled.zeta
    traj = evolve(gen, t_end=t_end, n_samples=2001)
    mu1 = traj.column("mu1")
    early = mu1[traj.times < 3]
    # mu1 rings at the frequency scale before settling
    assert np.count_nonzero(np.diff(np.sign(np.diff(early)))) >= 4
    avg = mu1[traj.times > 5].mean()
    assert 0.1 < avg / (scaled.n_atoms * scaled.g_c ** 2 / scaled.omega_c ** 2) < 10
    np.testing.assert_allclose(traj.states[-1], np.asarray(ss.steady), atol=1e-9)


def test_steady_state_is_fixed_point(scaled):
    gen = build_generator(scaled)
    ss = np.asarray(steady_state(gen, scaled).steady)
    traj = evolve(gen, ss, t_end=10.0, n_samples=5)
    np.testing.assert_allclose(traj.states, np.tile(ss, (5, 1)), atol=1e-12)


def test_scaled_steady_values(scaled):
    ss = steady_state(build_generator(scaled), scaled).steady
    assert ss.mu1 == pytest.approx(0.0051942669, rel=1e-8)
    assert ss.mu2 == pytest.approx(ss.mu1, rel=1e-12)


def test_resonant_spectrum(scaled):
    lam = np.linalg.eigvals(build_generator(scaled).A)
    np.testing.assert_allclose(lam.real, -scaled.zeta / 2, atol=1e-12)


@pytest.mark.parametrize("n", [1, 100, 10_000])
def test_chip_steady_against_high_precision(n):
    p = rb_chip_cavity(n)
    gen = build_generator(p)
    report = steady_state(gen, p)
    ref = mp_steady(gen)
    np.testing.assert_allclose(np.asarray(report.steady), ref, rtol=1e-12, atol=0)
    assert report.i_kappa == pytest.approx(p.kappa * ref[MU1], rel=1e-12)


def test_chip_rate_value(chip):
    report = steady_state(build_generator(chip), chip)
    assert report.i_kappa == pytest.approx(322.6197881, rel=1e-8)
    assert abs(report.i_kappa - 301) / 301 < 0.10


def test_chip_transient_against_exponential(chip):
    # raw SI rates, no rescaling
    gen = build_generator(chip)
    times = np.linspace(0, 100 / chip.omega_c, 21)
    traj = evolve(gen, times=times)
    ref = exact_evolution(gen, VACUUM, times)
    scale = np.abs(ref).max(axis=0)
    assert np.max(np.abs(traj.states - ref) / scale) < 1e-6


def test_rwa_vacuum_is_inert(scaled):
    p = scaled.with_rwa()
    gen = build_rwa_generator(p)
    traj = evolve(gen, t_end=20.0, n_samples=41)
    assert np.abs(traj.states).max() == 0.0
    assert steady_state(gen, p).i_kappa == 0.0


def test_zero_coupling_gives_zero_rates(chip):
    p = replace(chip, g_c=0.0)
    report = steady_state(build_generator(p), p)
    assert report.i_kappa == 0.0 and report.i_gamma == 0.0
    assert np.all(np.asarray(report.steady) == 0.0)


def test_singular_generator():
    p = SystemParams(1.0, 1.0, 0.0, 0.0, 0.0)
    with pytest.raises(SingularGeneratorError):
        steady_state(build_generator(p), p)


def test_emission_rates_formula():
    x = MomentVector.from_array(np.r_[2.0, 3.0, np.zeros(8)])
    p = SystemParams(1.0, 1.0, 0.1, 0.5, 0.25, 4)
    assert emission_rates(x, p) == (1.0, 3.0)


def test_evolve_arguments(scaled):
    gen = build_generator(scaled)
    with pytest.raises(ValueError):
        evolve(gen, t_end=-1.0)
    with pytest.raises(ValueError):
        evolve(gen, t_end=1.0, n_samples=1)
    with pytest.raises(ValueError):
        evolve(gen, times=[0.5, 1.0])
    with pytest.raises(ValueError):
        evolve(gen, t_end=1.0, rel_tol=0.0)


def test_step_cap(chip):
    gen = build_generator(chip)
    traj = evolve(gen, t_end=20 / chip.omega_c, n_samples=3)
    assert traj.stats.max_step <= 0.1 / gen.inf_norm() * (1 + 1e-12)


@settings(max_examples=25, deadline=None)
@given(w=st.floats(2.0, 20.0), detune=st.floats(0.7, 1.4), frac=st.floats(0.01, 0.3),
       k=st.floats(0.05, 2.0), gam=st.floats(0.05, 2.0), n=st.integers(1, 20))
def test_populations_stay_nonnegative(w, detune, frac, k, gam, n):
    g = frac * w / np.sqrt(n)
    p = SystemParams(w, w * detune, g, k, gam / n, n)
    traj = evolve(build_generator(p), t_end=10 / p.zeta, n_samples=101)
    ss = steady_state(build_generator(p), p).steady
    floor = -1e-9 * max(1.0, ss.mu1, ss.mu2)
    assert traj.states[:, MU1].min() >= floor
    assert traj.states[:, MU2].min() >= floor


@settings(max_examples=20, deadline=None)
@given(s=st.floats(0.01, 100.0))
def test_time_rescaling(s):
    scaled = SystemParams(10.0, 10.0, 1.0, 1.0, 1.0)
    times = np.linspace(0, 4, 9)
    a = evolve(build_generator(scaled), times=times).states
    b = evolve(build_generator(scaled.scaled(s)), times=times / s).states
    np.testing.assert_allclose(b, a, atol=1e-10)
