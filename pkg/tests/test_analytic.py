import math
import warnings
from dataclasses import replace

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavity_leak.analytic import (analytic_emission_rate, analytic_prediction,
                                  ground_state_parameter, mean_photon_estimate,
                                  relative_difference, validity_indicator)
from cavity_leak.dynamics import steady_state
from cavity_leak.model import SystemParams, build_generator, rb_chip_cavity
from cavity_leak.validation import random_regime_params


def mp_formula(p):
    """Closed form evaluated directly in raw units with 60 digits."""
    with mpmath.workdps(60):
        wa, wc, g, k, gam = (mpmath.mpf(v) for v in
                             (p.omega_a, p.omega_c, p.g_c, p.kappa, p.gamma))
        N = p.n_atoms
        z = k + N * gam
        num = N * z * k * g**2 * (8 * z * g**2 + z**2 * gam + 4 * gam * (wa - wc)**2)
        den = (16 * z**2 * g**2 * wa * wc + 2 * z**2 * k * gam * (wa**2 + wc**2)
               + 4 * k * gam * (wa**2 - wc**2)**2)
        return float(num / den)


def test_chip_value(chip):
    rate = analytic_emission_rate(chip)
    assert rate.value == pytest.approx(mp_formula(chip), rel=1e-13)
    assert rate.value == pytest.approx(322.619773, rel=1e-8)
    assert rate.validity == pytest.approx(1.9e11 / 3.842e14)


def test_chip_agrees_with_exact(chip):
    exact = steady_state(build_generator(chip), chip).i_kappa
    assert relative_difference(analytic_emission_rate(chip).value, exact) < 1e-6


def test_zero_coupling(chip):
    assert analytic_emission_rate(replace(chip, g_c=0.0)).value == 0.0


def test_vanishing_denominator():
    with pytest.raises(ZeroDivisionError):
        analytic_emission_rate(SystemParams(1.0, 1.0, 0.0, 1.0, 0.0))


def test_regime_warning(scaled, chip):
    with pytest.warns(UserWarning, match="validity"):
        analytic_emission_rate(scaled)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        analytic_emission_rate(chip)
        analytic_emission_rate(scaled, warn=False)


def _detuned(p, detunings):
    return np.array([analytic_emission_rate(replace(p, omega_a=p.omega_c + d)).value
                     for d in detunings])


@pytest.mark.parametrize("n", [1, 10, 100])
def test_resonance_beats_detuning_grid(n):
    # holds on this grid while N gamma stays well below kappa
    p = rb_chip_cavity(n)
    steps = np.logspace(0, 3.5, 50) * p.zeta
    rates = _detuned(p, np.concatenate([steps, -steps]))
    assert np.all(rates <= analytic_emission_rate(p).value)


def test_detuning_raises_rate_when_atomic_decay_dominates(chip):
    # with N gamma ~ 15 kappa a detuning of one linewidth doubles the rate,
    # in the exact stationary solution as well as in the closed form
    q = replace(chip, omega_a=chip.omega_c + chip.zeta)
    formula = _detuned(chip, [chip.zeta])[0]
    exact = steady_state(build_generator(q), q).i_kappa
    assert formula == pytest.approx(669.3414639, rel=1e-8)
    assert relative_difference(formula, exact) < 1e-4
    assert formula > 2 * analytic_emission_rate(chip).value


def test_ground_state_numbers(chip):
    assert ground_state_parameter(chip) == pytest.approx(1.587715e-4, rel=1e-6)
    assert mean_photon_estimate(chip) == pytest.approx(2.520838e-8, rel=1e-6)
    pred = analytic_prediction(chip)
    assert pred.ground_state_parameter ** 2 == pytest.approx(pred.mean_photon_estimate)


@pytest.mark.parametrize("which", ["chip", "scaled"])
def test_photon_number_order_of_magnitude(which, chip, scaled):
    p = chip if which == "chip" else scaled
    mu1 = steady_state(build_generator(p), p).steady.mu1
    ratio = mu1 / mean_photon_estimate(p)
    assert 1 / 3 < ratio < 3


@settings(max_examples=40, deadline=None)
@given(s=st.floats(1e-6, 1e6), seed=st.integers(0, 2**32 - 1))
def test_homogeneous_degree_one(s, seed):
    p = random_regime_params(np.random.default_rng(seed))
    a = analytic_emission_rate(p).value
    b = analytic_emission_rate(p.scaled(s)).value
    assert b == pytest.approx(s * a, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_agreement_in_regime(seed):
    p = random_regime_params(np.random.default_rng(seed))
    assert validity_indicator(p) <= 1e-3 * (1 + 1e-12)
    exact = steady_state(build_generator(p), p).i_kappa
    assert relative_difference(analytic_emission_rate(p).value, exact) <= 1e-2


def test_relative_difference():
    assert relative_difference(0.0, 0.0) == 0.0
    assert relative_difference(1.0, 0.0) == math.inf
    assert relative_difference(1.1, -1.0) == pytest.approx(2.1)
