"""Acceptance suite: analytic, moment, master-equation and trajectory cross-checks.

Each ``check_*`` returns a :class:`Criterion`; :func:`run_acceptance`
runs them all. Bounds are fixed here and are not configurable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .analytic import analytic_emission_rate, ground_state_parameter, relative_difference
from .dynamics import evolve, steady_state
from .fock import FockConfig, ground_state, lindblad_evolve, lindblad_moments, \
    trace_distance, vacuum_density
from .jumps import CAVITY, mcwf_trajectories
from .model import INDEX, SystemParams, build_generator, build_rwa_generator, \
    rb_chip_cavity, scaled_regime

PUBLISHED_RATE = 301.0  # s^-1, chip cavity with N = 1e4


@dataclass
class Criterion:
    id: str
    title: str
    measured: float
    bound: float
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.id} {status} measured={self.measured:.6g} "
                f"bound={self.bound:.6g} ({self.title})")


def random_regime_params(rng, max_ratio=1e-3) -> SystemParams:
    """Random parameters with ``max(N gamma, sqrt(N) g_c, kappa) <= max_ratio * min(omega)``."""
    wc = float(10 ** rng.uniform(9, 15))
    wa = wc * float(10 ** rng.uniform(-0.3, 0.3))
    n = int(round(10 ** rng.uniform(0, 5)))
    limit = max_ratio * min(wa, wc)
    atomic, coupling, kappa = (float(v) for v in limit * 10 ** rng.uniform(-4, 0, size=3))
    return SystemParams(omega_c=wc, omega_a=wa, g_c=coupling / math.sqrt(n),
                        kappa=kappa, gamma=atomic / n, n_atoms=n)


def check_analytic_agreement(seed=0, n_draws=100, bound=1e-2) -> Criterion:
    rng = np.random.default_rng(seed)
    worst, worst_params = 0.0, None
    for _ in range(n_draws):
        p = random_regime_params(rng)
        exact = steady_state(build_generator(p), p).i_kappa
        formula = analytic_emission_rate(p).value
        err = relative_difference(formula, exact)
        if err > worst:
            worst, worst_params = err, p
    return Criterion("A1", "closed-form vs exact stationary rate, random draws",
                     worst, bound, worst <= bound,
                     {"n_draws": n_draws, "worst_params": worst_params})


def check_published_rate(bound=0.10) -> Criterion:
    p = rb_chip_cavity(10_000)
    exact = steady_state(build_generator(p), p).i_kappa
    formula = analytic_emission_rate(p).value
    err = max(relative_difference(exact, PUBLISHED_RATE),
              relative_difference(formula, PUBLISHED_RATE))
    return Criterion("A2", "chip-cavity rate vs published 301 s^-1", err, bound,
                     err <= bound, {"i_kappa_exact": exact, "i_kappa_formula": formula,
                                    "published": PUBLISHED_RATE})


def _corrupted(gen, corrupt):
    if corrupt is None:
        return gen
    row, col, delta = corrupt
    A = gen.A.copy()
    A[INDEX[row], INDEX[col]] += delta
    return type(gen)(A, gen.b.copy())


def check_oracle_equivalence(t_end=20.0, n_samples=201, cfg=FockConfig(8, 8),
                             bound=1e-6, corrupt=None) -> Criterion:
    """Moment equations vs master equation on all ten moments from vacuum."""
    p = scaled_regime()
    times = np.linspace(0.0, t_end, n_samples)
    gen = _corrupted(build_generator(p), corrupt)
    moments = evolve(gen, times=times).states
    _, oracle = lindblad_moments(p, cfg, times=times)
    diff = float(np.max(np.abs(moments - oracle)))
    return Criterion("A3", "moment equations vs truncated-Fock master equation",
                     diff, bound, diff <= bound,
                     {"t_end": t_end, "dims": (cfg.dim_c, cfg.dim_a),
                      "corrupted": corrupt is not None})


def check_rwa_null(t_end=20.0, n_samples=101, cfg=FockConfig(8, 8),
                   moment_bound=1e-12, trace_bound=1e-10) -> Criterion:
    p = scaled_regime(rotating_wave=True)
    times = np.linspace(0.0, t_end, n_samples)
    moments = evolve(build_rwa_generator(p), times=times).states
    moment_max = float(np.max(np.abs(moments)))
    vac = vacuum_density(cfg)
    dist = max(trace_distance(rho, vac)
               for _, rho in lindblad_evolve(p, cfg, vac, times=times))
    rates = []
    for q in (p, rb_chip_cavity(10_000, rotating_wave=True)):
        rates.append(steady_state(build_rwa_generator(q), q).i_kappa)
    rate_max = max(abs(r) for r in rates)
    passed = moment_max <= moment_bound and dist <= trace_bound and rate_max == 0.0
    return Criterion("A4", "rotating-wave model stays in the vacuum",
                     max(moment_max, dist, rate_max), trace_bound, passed,
                     {"moment_max": moment_max, "trace_distance": dist,
                      "i_kappa": rates})


def check_click_rates(seed, n_traj=10_000, t_end=60.0, t_start=10.0,
                      cfg=FockConfig(8, 8), n_sigma=3.0, workers=1) -> Criterion:
    if seed is None:
        raise ValueError("the trajectory criterion needs an explicit seed")
    p = scaled_regime()
    report = steady_state(build_generator(p), p)
    run = mcwf_trajectories(p, cfg, t_end=t_end, n_traj=n_traj, seed=seed,
                            workers=workers)
    cavity = run.click_rate(CAVITY, t_start=t_start)
    total = run.click_rate(None, t_start=t_start)
    z_cavity = abs(cavity.rate - report.i_kappa) / cavity.stderr
    z_total = abs(total.rate - (report.i_kappa + report.i_gamma)) / total.stderr
    z = max(z_cavity, z_total)
    return Criterion("A5", "quantum-jump click rates vs stationary fluxes",
                     z, n_sigma, z <= n_sigma,
                     {"cavity_rate": cavity.rate, "cavity_stderr": cavity.stderr,
                      "i_kappa": report.i_kappa, "total_rate": total.rate,
                      "total_stderr": total.stderr,
                      "expected_total": report.i_kappa + report.i_gamma,
                      "z_cavity": z_cavity, "z_total": z_total, "seed": seed,
                      "n_traj": n_traj})


def ground_state_sweep(couplings, base=None, cfg=FockConfig(8, 8)):
    """Overlap deficit and entropy of the ground state for each collective coupling."""
    base = scaled_regime() if base is None else base
    x, deficit, entropy = [], [], []
    for G in couplings:
        p = SystemParams(base.omega_c, base.omega_a, G / math.sqrt(base.n_atoms),
                         base.kappa, base.gamma, base.n_atoms)
        gs = ground_state(p, cfg)
        x.append(ground_state_parameter(p))
        deficit.append(gs.deficit)
        entropy.append(gs.entropy)
    return np.array(x), np.array(deficit), np.array(entropy)


def check_ground_state_scaling(n_points=11, slope_tol=0.1) -> Criterion:
    couplings = np.logspace(-1, 0, n_points)
    x, deficit, entropy = ground_state_sweep(couplings)
    slope = float(np.polyfit(np.log(x), np.log(deficit), 1)[0])
    passed = abs(slope - 2.0) <= slope_tol and bool(np.all(entropy > 0))
    return Criterion("A6", f"ground-state deficit vs (sqrt(N) g_c / omega)^2, "
                     f"log-log slope {slope:.4f}",
                     abs(slope - 2.0), slope_tol, passed,
                     {"slope": slope, "min_entropy": float(entropy.min()),
                      "x_range": (float(x[0]), float(x[-1]))})


def run_acceptance(seed, n_traj=10_000, corrupt=None, workers=1):
    """All six criteria in order. ``seed`` drives the random draws and trajectories."""
    if seed is None:
        raise ValueError("run_acceptance needs an explicit seed")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return [
            check_analytic_agreement(seed),
            check_published_rate(),
            check_oracle_equivalence(corrupt=corrupt),
            check_rwa_null(),
            check_click_rates(seed, n_traj=n_traj, workers=workers),
            check_ground_state_scaling(),
        ]
