"""Time evolution and stationary state of the moment equations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from .integrate import IntegrationError, StepStats, dopri5
from .model import MOMENT_NAMES, VACUUM, MomentGenerator, MomentVector, SystemParams

__all__ = ["Trajectory", "EmissionReport", "SingularGeneratorError",
           "IntegrationError", "evolve", "exact_evolution", "steady_state",
           "emission_rates"]

MAX_CONDITION = 1e12
# accepted steps are capped at STEP_FRACTION / ||A||_inf
STEP_FRACTION = 0.1


class SingularGeneratorError(np.linalg.LinAlgError):
    def __init__(self, condition):
        super().__init__(f"generator is singular or ill-conditioned "
                         f"(1-norm condition estimate {condition:.3e})")
        self.condition = condition


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), 10)
    params_hash: str = ""
    stats: StepStats | None = None

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i) -> MomentVector:
        return MomentVector.from_array(self.states[i])

    def column(self, name: str) -> np.ndarray:
        return self.states[:, MOMENT_NAMES.index(name)]


@dataclass(frozen=True)
class EmissionReport:
    steady: MomentVector
    i_kappa: float
    i_gamma: float
    residual: float
    condition: float


def evolve(gen: MomentGenerator, x0=VACUUM, t_end=None, rel_tol=1e-10,
           abs_tol=1e-14, times=None, n_samples=201, params_hash="") -> Trajectory:
    """Integrate the moment equations from ``x0`` over ``[0, t_end]``.

    Samples are returned at ``times`` (which must start at 0) or on a
    uniform grid of ``n_samples`` points.
    """
    if times is None:
        if t_end is None or not t_end > 0:
            raise ValueError("t_end must be positive")
        if n_samples < 2:
            raise ValueError("n_samples must be at least 2")
        times = np.linspace(0.0, t_end, n_samples)
    else:
        times = np.asarray(times, dtype=float)
        if times[0] != 0.0:
            raise ValueError("sample times must start at 0")
        t_end = float(times[-1]) if t_end is None else t_end
        if not t_end > 0:
            raise ValueError("t_end must be positive")
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")

    x0 = np.asarray(x0, dtype=float)
    A, b = gen.A, gen.b
    norm = gen.inf_norm()
    max_step = STEP_FRACTION / norm if norm > 0 else np.inf

    def rhs(t, x):
        return A @ x + b

    stats = StepStats()
    states = dopri5(rhs, (0.0, t_end), x0, times, rtol=rel_tol, atol=abs_tol,
                    max_step=max_step, stats=stats)
    return Trajectory(times, states, params_hash, stats)


def exact_evolution(gen: MomentGenerator, x0, times) -> np.ndarray:
    """Closed-form ``x(t) = x_ss + exp(A t) (x0 - x_ss)`` by matrix exponential."""
    x_ss = np.linalg.solve(gen.A, -gen.b)
    x0 = np.asarray(x0, dtype=float)
    return np.array([x_ss + scipy.linalg.expm(gen.A * t) @ (x0 - x_ss)
                     for t in times])


def _exact_residual(A_frac, b_frac, x):
    x_frac = [Fraction(v) for v in x]
    r = []
    for row, bi in zip(A_frac, b_frac):
        acc = bi
        for j, a in row:
            acc += a * x_frac[j]
        r.append(float(acc))
    return np.array(r)


def steady_state(gen: MomentGenerator, params: SystemParams,
                 refinements=4) -> EmissionReport:
    """Solve ``A x = -b`` and derive the two emission rates.

    The stationary photon number is many orders of magnitude below the
    mixed moments at optical frequencies, so a plain double-precision
    solve loses it to cancellation. The LU solution is refined against
    residuals evaluated exactly in rational arithmetic.
    """
    A, b = gen.A, gen.b
    with np.errstate(divide="ignore", invalid="ignore"):
        condition = float(np.linalg.cond(A, 1))
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise SingularGeneratorError(condition)
    lu = scipy.linalg.lu_factor(A)
    x = scipy.linalg.lu_solve(lu, -b)

    A_frac = [[(j, Fraction(a)) for j, a in enumerate(row) if a != 0] for row in A]
    b_frac = [Fraction(v) for v in b]
    r = _exact_residual(A_frac, b_frac, x)
    for _ in range(refinements):
        dx = scipy.linalg.lu_solve(lu, -r)
        x = x + dx
        r = _exact_residual(A_frac, b_frac, x)
        if np.all(np.abs(dx) <= 4 * np.finfo(float).eps * np.abs(x)):
            break

    steady = MomentVector.from_array(x)
    i_kappa, i_gamma = emission_rates(steady, params)
    return EmissionReport(steady, i_kappa, i_gamma,
                          residual=float(np.max(np.abs(r))), condition=condition)


def emission_rates(steady: MomentVector, params: SystemParams):
    """Cavity and atomic photon fluxes ``(kappa mu1, N gamma mu2)``."""
    # + 0.0 turns -0.0 into 0.0
    return (float(params.kappa * steady.mu1) + 0.0,
            float(params.atomic_decay * steady.mu2) + 0.0)
