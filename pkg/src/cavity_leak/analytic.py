"""Closed-form estimates valid when all rates are small against the optical frequencies."""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple

from .model import SystemParams, validate_params

VALIDITY_WARN = 1e-2


class AnalyticRate(NamedTuple):
    value: float
    validity: float  # max(N gamma, sqrt(N) g_c, kappa) / min(omega_a, omega_c)


class AnalyticPrediction(NamedTuple):
    i_kappa_formula: float
    mean_photon_estimate: float
    ground_state_parameter: float


def validity_indicator(params: SystemParams) -> float:
    return (max(params.atomic_decay, params.coupling, params.kappa)
            / min(params.omega_a, params.omega_c))


def analytic_emission_rate(params: SystemParams, warn=True) -> AnalyticRate:
    """Stationary cavity emission rate from the small-rate closed form.

    The rate is homogeneous of degree one in (omega_c, omega_a, g_c,
    kappa, gamma), so it is evaluated with everything divided by
    ``max(omega_a, omega_c)`` and multiplied back at the end; the raw
    terms would otherwise reach ~1e73.
    """
    validate_params(params)
    ref = max(params.omega_a, params.omega_c)
    wa, wc = params.omega_a / ref, params.omega_c / ref
    g, k, gam = params.g_c / ref, params.kappa / ref, params.gamma / ref
    N = params.n_atoms
    zeta = k + N * gam

    numerator = N * zeta * k * g ** 2 * (8 * zeta * g ** 2 + zeta ** 2 * gam
                                         + 4 * gam * (wa - wc) ** 2)
    denominator = (16 * zeta ** 2 * g ** 2 * wa * wc
                   + 2 * zeta ** 2 * k * gam * (wa ** 2 + wc ** 2)
                   + 4 * k * gam * (wa ** 2 - wc ** 2) ** 2)
    validity = validity_indicator(params)
    if denominator == 0.0:
        raise ZeroDivisionError(
            "closed-form rate has a vanishing denominator at these parameters "
            f"(g_c={params.g_c!r}, kappa={params.kappa!r}, gamma={params.gamma!r})")
    if warn and validity > VALIDITY_WARN:
        warnings.warn(f"closed form used outside its regime: validity indicator "
                      f"{validity:.3g} > {VALIDITY_WARN}", stacklevel=2)
    return AnalyticRate(ref * numerator / denominator, validity)


def ground_state_parameter(params: SystemParams) -> float:
    """``sqrt(N) g_c / omega_c``: size of the ground-state admixture to ``|0,0>``."""
    validate_params(params)
    return params.coupling / params.omega_c


def mean_photon_estimate(params: SystemParams) -> float:
    """Order-of-magnitude cavity photon number ``N g_c^2 / omega_c^2``."""
    validate_params(params)
    return params.n_atoms * (params.g_c / params.omega_c) ** 2


def analytic_prediction(params: SystemParams, warn=True) -> AnalyticPrediction:
    rate = analytic_emission_rate(params, warn=warn)
    return AnalyticPrediction(rate.value, mean_photon_estimate(params),
                              ground_state_parameter(params))


def relative_difference(a: float, b: float) -> float:
    """``|a - b| / |b|``, with 0 when both vanish."""
    if b == 0.0:
        return 0.0 if a == 0.0 else math.inf
    return abs(a - b) / abs(b)
