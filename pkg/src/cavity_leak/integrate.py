"""Dormand-Prince 5(4) integrator with PI step control and dense output.

Small, dense, non-stiff systems only. The right-hand side is called as
``f(t, y)`` and must return an array shaped like ``y``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
A = [np.array(row) for row in A]
B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
# difference between the 5th and embedded 4th order weights
E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension, columns multiply theta, theta^2, theta^3, theta^4
P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

ORDER = 5
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
# PI controller exponents (Gustafsson)
ALPHA = 0.7 / ORDER
BETA = 0.4 / ORDER


class IntegrationError(RuntimeError):
    """Raised on step-size underflow or a non-finite state."""

    def __init__(self, message, t_reached):
        super().__init__(f"{message} (t reached = {t_reached!r})")
        self.t_reached = t_reached


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    max_step: float = 0.0
    min_step: float = np.inf


def _initial_step(f, t0, y0, f0, rtol, atol, max_step):
    scale = atol + np.abs(y0) * rtol
    d0 = np.linalg.norm(y0 / scale) / np.sqrt(y0.size)
    d1 = np.linalg.norm(f0 / scale) / np.sqrt(y0.size)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = np.linalg.norm((f1 - f0) / scale) / np.sqrt(y0.size) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / ORDER)
    return min(100 * h0, h1, max_step)


def dopri5(f, t_span, y0, t_eval, rtol=1e-10, atol=1e-14, max_step=np.inf,
           first_step=None, stats: StepStats | None = None):
    """Integrate ``y' = f(t, y)`` and return ``y`` sampled at ``t_eval``.

    ``t_eval`` must be increasing and lie in ``t_span``; samples are taken
    from the 4th-order continuous extension. Every accepted step is at
    most ``max_step``.
    """
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval.ndim != 1 or np.any(np.diff(t_eval) <= 0):
        raise ValueError("t_eval must be strictly increasing")
    if t_eval.size and (t_eval[0] < t0 or t_eval[-1] > t1):
        raise ValueError("t_eval outside t_span")

    y = np.array(y0, dtype=float)
    out = np.empty((t_eval.size, y.size))
    if stats is None:
        stats = StepStats()

    t = t0
    k = np.empty((7, y.size))
    k[0] = f(t, y)
    h = first_step or _initial_step(f, t, y, k[0], rtol, atol, max_step)
    err_prev = 1.0
    i_out = 0
    while i_out < t_eval.size and t_eval[i_out] == t0:
        out[i_out] = y
        i_out += 1

    while t < t1:
        h = min(h, max_step)
        last = h >= (t1 - t) * (1 - 1e-12)
        if last:
            h = t1 - t
        if h <= 16 * np.spacing(t):
            raise IntegrationError("step size underflow", t)
        for s in range(1, 7):
            k[s] = f(t + C[s] * h, y + h * (A[s] @ k[:s]))
        y_new = y + h * (B @ k)
        if not np.all(np.isfinite(y_new)):
            bad = int(np.flatnonzero(~np.isfinite(y_new))[0])
            raise IntegrationError(f"non-finite state in component {bad}", t)
        scale = atol + np.maximum(np.abs(y), np.abs(y_new)) * rtol
        err = np.sqrt(np.mean((h * (E @ k) / scale) ** 2))

        if err <= 1.0:
            t_new = t1 if last else t + h
            while i_out < t_eval.size and t_eval[i_out] <= t_new:
                if t_eval[i_out] == t_new:
                    out[i_out] = y_new
                else:
                    theta = (t_eval[i_out] - t) / h
                    powers = theta ** np.arange(1, 5)
                    out[i_out] = y + h * (k.T @ (P @ powers))
                i_out += 1
            stats.accepted += 1
            stats.max_step = max(stats.max_step, h)
            stats.min_step = min(stats.min_step, h)
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * err ** -ALPHA * max(err_prev, 1e-4) ** BETA
                factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            err_prev = err
            t, y = t_new, y_new
            k[0] = k[6]
            h *= factor
        else:
            stats.rejected += 1
            h *= max(MIN_FACTOR, SAFETY * err ** -(1 / ORDER))
    return out
