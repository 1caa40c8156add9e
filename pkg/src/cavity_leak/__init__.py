"""Stationary photon emission of an undriven atom-cavity system with counter-rotating coupling.

The closed moment equations (:mod:`cavity_leak.model`,
:mod:`cavity_leak.dynamics`) are checked against a closed-form rate
(:mod:`cavity_leak.analytic`) and against an independent truncated-Fock
master-equation and quantum-jump simulation (:mod:`cavity_leak.fock`,
:mod:`cavity_leak.jumps`).
"""

__version__ = "0.1.0"

from .analytic import (AnalyticPrediction, AnalyticRate, analytic_emission_rate,
                       analytic_prediction, ground_state_parameter, mean_photon_estimate)
from .dynamics import (EmissionReport, SingularGeneratorError, Trajectory, emission_rates,
                       evolve, exact_evolution, steady_state)
from .fock import (FockConfig, GroundState, build_operators, extract_moments, ground_state,
                   lindblad_evolve, lindblad_moments)
from .integrate import IntegrationError
from .jumps import McwfResult, mcwf_trajectories
from .model import (MOMENT_NAMES, VACUUM, MomentGenerator, MomentVector, SystemParams,
                    build_generator, build_rwa_generator, generator_for, rb_chip_cavity,
                    scaled_regime, validate_params)
