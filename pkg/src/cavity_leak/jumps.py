"""Quantum-jump (Monte-Carlo wave-function) unravelling of the master equation.

Between clicks a trajectory evolves under the non-Hermitian conditional
Hamiltonian; a click happens when the squared norm falls below a uniform
random threshold, and the jump operator (``sqrt(kappa) c`` for a cavity
photon, ``sqrt(N gamma) S-`` for an atomic one) is chosen with
probability proportional to its rate. Trajectory ``i`` draws from its own
stream seeded by ``(seed, i)``, so results do not depend on batching.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from .fock import FockConfig, FockOperators, build_operators, fock_state, state_moments
from .model import SystemParams

CAVITY, ATOMIC = 0, 1
CHANNEL_NAMES = ("cavity", "atomic")


class NormCollapseError(RuntimeError):
    pass


@dataclass(frozen=True)
class ClickRate:
    rate: float
    stderr: float
    window: tuple


@dataclass(frozen=True)
class McwfResult:
    times: np.ndarray
    mean_moments: np.ndarray  # (len(times), 10)
    moment_stderr: np.ndarray
    click_times: list  # per trajectory, sorted array of click times
    click_channels: list  # per trajectory, CAVITY or ATOMIC per click
    seed: int
    t_end: float

    @property
    def n_traj(self) -> int:
        return len(self.click_times)

    def counts(self, channel=None, t_start=0.0, t_stop=None) -> np.ndarray:
        t_stop = self.t_end if t_stop is None else t_stop
        out = np.empty(self.n_traj)
        for i, (ts, ch) in enumerate(zip(self.click_times, self.click_channels)):
            sel = (ts >= t_start) & (ts < t_stop)
            if channel is not None:
                sel &= ch == channel
            out[i] = np.count_nonzero(sel)
        return out

    def click_rate(self, channel=None, t_start=0.0, t_stop=None) -> ClickRate:
        """Mean click rate over ``[t_start, t_stop)`` with its standard error.

        ``channel=None`` counts clicks of both kinds.
        """
        t_stop = self.t_end if t_stop is None else t_stop
        span = t_stop - t_start
        if not span > 0:
            raise ValueError("empty counting window")
        n = self.counts(channel, t_start, t_stop)
        stderr = n.std(ddof=1) / np.sqrt(n.size) / span if n.size > 1 else np.inf
        return ClickRate(float(n.mean() / span), float(stderr), (t_start, t_stop))


class _Propagator:
    """``exp(-i H t)`` for arbitrary ``t`` through an eigendecomposition of ``H``."""

    def __init__(self, h):
        self.h = h
        lam, vecs = np.linalg.eig(h)
        self.lam, self.vecs = lam, vecs
        self.inv = np.linalg.solve(vecs, np.eye(h.shape[0]))
        recon = vecs @ np.diag(lam) @ self.inv
        scale = max(1.0, np.abs(h).max())
        self.exact = np.abs(recon - h).max() > 1e-10 * scale

    def apply(self, psi, tau):
        if self.exact:
            return scipy.linalg.expm(-1j * self.h * tau) @ psi
        return self.vecs @ (np.exp(-1j * self.lam * tau) * (self.inv @ psi))

    def modes(self, psi):
        return self.inv @ psi

    def norm2_from_modes(self, coeffs, tau):
        if self.exact:
            raise RuntimeError("eigenbasis unusable")
        v = self.vecs @ (np.exp(-1j * self.lam * tau) * coeffs)
        return float(np.vdot(v, v).real)


def _norm2(psi):
    return float(np.vdot(psi, psi).real)


def _jump(psi, ops_dense, rates, rng):
    weights = np.array([r * _norm2(op @ psi) for op, r in zip(ops_dense, rates)])
    total = weights.sum()
    if not total > 0:
        raise NormCollapseError("norm decayed but no jump channel is available")
    channel = int(np.searchsorted(np.cumsum(weights) / total, rng.random(), side="right"))
    channel = min(channel, len(rates) - 1)
    new = ops_dense[channel] @ psi
    return new / np.sqrt(_norm2(new)), channel


def _advance_one(psi, t, dt, threshold, prop, ops_dense, rates, rng, clicks):
    """Evolve one trajectory over ``[t, t + dt]`` resolving every click inside."""
    remaining = dt
    while True:
        end = prop.apply(psi, remaining)
        if _norm2(end) > threshold:
            return end, threshold
        if prop.exact:
            f = lambda tau: _norm2(prop.apply(psi, tau)) - threshold
        else:
            coeffs = prop.modes(psi)
            f = lambda tau: prop.norm2_from_modes(coeffs, tau) - threshold
        tau = brentq(f, 0.0, remaining, xtol=1e-13 * max(1.0, dt), rtol=1e-12)
        psi = prop.apply(psi, tau)
        t += tau
        remaining -= tau
        psi, channel = _jump(psi, ops_dense, rates, rng)
        clicks.append((t, channel))
        threshold = rng.random()


def _run_batch(ops: FockOperators, psi0, indices, seed, step_times, sample_mask, dt):
    params = ops.params
    prop = _Propagator(ops.h_cond)
    u_dt = scipy.linalg.expm(-1j * ops.h_cond * dt)
    ops_dense = (ops.c.toarray(), ops.sm.toarray())
    rates = (params.kappa, params.atomic_decay)

    rngs = [np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(int(i),)))
            for i in indices]
    thresholds = np.array([rng.random() for rng in rngs])
    psi = np.repeat(psi0[:, None], len(indices), axis=1).astype(complex)
    clicks = [[] for _ in indices]

    samples = []
    if sample_mask[0]:
        samples.append(state_moments(psi, ops))
    for k in range(1, len(step_times)):
        t = step_times[k - 1]
        trial = u_dt @ psi
        norm2 = np.sum(np.abs(trial) ** 2, axis=0)
        for j in np.flatnonzero(norm2 <= thresholds):
            trial[:, j], thresholds[j] = _advance_one(
                psi[:, j], t, dt, thresholds[j], prop, ops_dense, rates, rngs[j], clicks[j])
        psi = trial
        if sample_mask[k]:
            samples.append(state_moments(psi, ops))
    return np.array(samples), clicks


def mcwf_trajectories(params: SystemParams, cfg: FockConfig = FockConfig(), psi0=None,
                      t_end=60.0, n_traj=1000, seed=None, n_samples=61,
                      max_dt=0.1, batch_size=1000, workers=1) -> McwfResult:
    """Run ``n_traj`` quantum-jump trajectories from ``psi0`` (default ``|0,0>``).

    No-jump evolution uses the exact propagator of the conditional
    Hamiltonian on a grid of step ``<= max_dt``; click times inside a step
    are located by root finding, so ``max_dt`` only affects speed.
    Ensemble moments are sampled on ``n_samples`` uniform times.
    """
    if seed is None:
        raise ValueError("a seed is required for reproducible trajectories")
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    ops = build_operators(params, cfg)
    psi0 = fock_state(cfg) if psi0 is None else np.asarray(psi0, dtype=complex)
    if psi0.shape != (cfg.dim,):
        raise ValueError(f"psi0 has shape {psi0.shape}, expected {(cfg.dim,)}")
    psi0 = psi0 / np.sqrt(_norm2(psi0))

    sample_times = np.linspace(0.0, t_end, n_samples)
    per_sample = max(1, int(np.ceil((sample_times[1] - sample_times[0]) / max_dt - 1e-12)))
    dt = (sample_times[1] - sample_times[0]) / per_sample
    n_steps = per_sample * (n_samples - 1)
    step_times = np.linspace(0.0, t_end, n_steps + 1)
    sample_mask = np.zeros(n_steps + 1, dtype=bool)
    sample_mask[::per_sample] = True

    batches = [np.arange(s, min(s + batch_size, n_traj)) for s in range(0, n_traj, batch_size)]
    run = lambda idx: _run_batch(ops, psi0, idx, seed, step_times, sample_mask, dt)
    if workers > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, batches))
    else:
        results = [run(idx) for idx in batches]

    moments = np.concatenate([m for m, _ in results], axis=1)  # (samples, traj, 10)
    click_lists = [c for _, cl in results for c in cl]
    click_times = [np.array([t for t, _ in c]) for c in click_lists]
    click_channels = [np.array([ch for _, ch in c], dtype=int) for c in click_lists]
    mean = moments.mean(axis=1)
    stderr = (moments.std(axis=1, ddof=1) / np.sqrt(n_traj) if n_traj > 1
              else np.full_like(mean, np.inf))
    return McwfResult(sample_times, mean, stderr, click_times, click_channels,
                      seed, float(t_end))
