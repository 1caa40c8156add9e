"""Truncated two-mode Fock-space simulation of the atom-cavity master equation.

Basis ordering is ``|n_c> (x) |n_a>`` with ``n_c`` the slow index, i.e.
flat index ``n_c * dim_a + n_a``. Energies are in angular-frequency
units (hbar = 1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .model import MomentVector, SystemParams, validate_params

DEFAULT_MAX_DIM = 1024
LEAK_TOL = 1e-6
IMAG_TOL = 1e-10


class TruncationError(RuntimeError):
    def __init__(self, mode, population, t):
        super().__init__(f"population of the top {mode} Fock level grew to "
                         f"{population:.3e} at t={t!r}; enlarge dim_{mode[0]}")
        self.mode = mode
        self.population = population


class TraceDriftError(RuntimeError):
    pass


@dataclass(frozen=True)
class FockConfig:
    dim_c: int = 8
    dim_a: int = 8
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        for name in ("dim_c", "dim_a"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 2:
                raise ValueError(f"{name} must be an integer >= 2, got {v!r}")
        if self.dim > self.max_dim:
            raise ValueError(f"Hilbert space dimension {self.dim} exceeds the cap "
                             f"max_dim={self.max_dim}")

    @property
    def dim(self) -> int:
        return self.dim_c * self.dim_a

    def enlarged(self, by: int = 2) -> "FockConfig":
        return replace(self, dim_c=self.dim_c + by, dim_a=self.dim_a + by,
                       max_dim=max(self.max_dim, (self.dim_c + by) * (self.dim_a + by)))

    def index(self, n_c: int, n_a: int) -> int:
        return n_c * self.dim_a + n_a


def destroy(dim: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, dim)), 1, shape=(dim, dim), format="csr")


@dataclass(frozen=True)
class FockOperators:
    """Sparse mode operators and the dense Hamiltonians built from them."""

    cfg: FockConfig
    params: SystemParams
    c: sp.csr_matrix
    sm: sp.csr_matrix
    h_full: np.ndarray
    h_rwa: np.ndarray
    h_cond: np.ndarray
    moment_ops: tuple

    @property
    def c_dag(self):
        return self.c.conj().T.tocsr()

    @property
    def s_plus(self):
        return self.sm.conj().T.tocsr()

    @property
    def hamiltonian(self) -> np.ndarray:
        return self.h_rwa if self.params.rotating_wave else self.h_full


def _moment_operators(c, cd, sm, spl):
    return (
        cd @ c,
        spl @ sm,
        1j * (sm + spl) @ (c - cd),
        1j * (sm - spl) @ (c + cd),
        (sm - spl) @ (c - cd),
        (sm + spl) @ (c + cd),
        1j * (c @ c - cd @ cd),
        c @ c + cd @ cd,
        1j * (sm @ sm - spl @ spl),
        sm @ sm + spl @ spl,
    )


def build_operators(params: SystemParams, cfg: FockConfig = FockConfig()) -> FockOperators:
    validate_params(params)
    eye_c = sp.identity(cfg.dim_c, format="csr")
    eye_a = sp.identity(cfg.dim_a, format="csr")
    c = sp.kron(destroy(cfg.dim_c), eye_a, format="csr")
    sm = sp.kron(eye_c, destroy(cfg.dim_a), format="csr")
    cd, spl = c.conj().T.tocsr(), sm.conj().T.tocsr()

    G = params.coupling
    free = params.omega_c * (cd @ c) + params.omega_a * (spl @ sm)
    h_full = (free + G * (c + cd) @ (spl + sm)).toarray()
    h_rwa = (free + G * (c @ spl + cd @ sm)).toarray()
    h = h_rwa if params.rotating_wave else h_full
    h_cond = h - 0.5j * (params.kappa * (cd @ c) + params.atomic_decay * (spl @ sm)).toarray()
    moment_ops = tuple(op.toarray() for op in _moment_operators(c, cd, sm, spl))
    return FockOperators(cfg, params, c, sm, h_full, h_rwa, h_cond, moment_ops)


def fock_state(cfg: FockConfig, n_c: int = 0, n_a: int = 0) -> np.ndarray:
    psi = np.zeros(cfg.dim, dtype=complex)
    psi[cfg.index(n_c, n_a)] = 1.0
    return psi


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi)
    return np.outer(psi, psi.conj())


def vacuum_density(cfg: FockConfig) -> np.ndarray:
    return projector(fock_state(cfg))


def extract_moments(rho, ops: FockOperators) -> MomentVector:
    """The ten moments ``Tr(O rho)``; raises if any has an imaginary part above 1e-10."""
    rho = np.asarray(rho)
    # Tr(O rho) = sum_ij O_ij rho_ji
    values = np.array([np.sum(op * rho.T) for op in ops.moment_ops])
    worst = np.max(np.abs(values.imag))
    if worst > IMAG_TOL:
        raise ValueError(f"imaginary residue {worst:.3e} in extracted moments")
    return MomentVector.from_array(values.real)


def state_moments(psi, ops: FockOperators) -> np.ndarray:
    """Moments of (possibly several, column-stacked) unnormalised pure states."""
    psi = np.asarray(psi)
    single = psi.ndim == 1
    if single:
        psi = psi[:, None]
    norm2 = np.sum(np.abs(psi) ** 2, axis=0)
    values = np.array([np.sum(psi.conj() * (op @ psi), axis=0) for op in ops.moment_ops])
    values = values.real / norm2
    return values[:, 0] if single else values.T


def liouvillian_rhs(ops: FockOperators):
    """``drho/dt`` on the flattened density matrix, Hermitian part only."""
    n = ops.cfg.dim
    hc = ops.h_cond
    hc_dag = hc.conj().T
    c, cd = ops.c.toarray(), ops.c_dag.toarray()
    sm, spl = ops.sm.toarray(), ops.s_plus.toarray()
    k, NG = ops.params.kappa, ops.params.atomic_decay

    def rhs(t, y):
        rho = y.reshape(n, n)
        d = -1j * (hc @ rho - rho @ hc_dag) + k * (c @ rho @ cd) + NG * (sm @ rho @ spl)
        return (0.5 * (d + d.conj().T)).ravel()

    return rhs


def top_level_populations(rho, cfg: FockConfig):
    p = np.real(np.diag(rho)).reshape(cfg.dim_c, cfg.dim_a)
    return p[-1, :].sum(), p[:, -1].sum()


def lindblad_evolve(params: SystemParams, cfg: FockConfig = FockConfig(), rho0=None,
                    t_end=None, tol=1e-10, times=None, n_samples=201,
                    leak_tol=LEAK_TOL):
    """Integrate the master equation; return ``[(t, rho), ...]`` at the sample times.

    Decay enters as ``kappa D[c] + N gamma D[S-]``. Each stage derivative
    is projected onto its Hermitian part, so ``rho`` stays Hermitian to
    round-off. Raises ``TruncationError`` if the population of either
    top Fock level grows by more than ``leak_tol`` above its initial
    value, and ``TraceDriftError`` if the trace moves by more than
    ``1e-8 * max(1, t_end * zeta)``.
    """
    ops = build_operators(params, cfg)
    if rho0 is None:
        rho0 = vacuum_density(cfg)
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (cfg.dim, cfg.dim):
        raise ValueError(f"rho0 has shape {rho0.shape}, expected {(cfg.dim, cfg.dim)}")
    if times is None:
        if t_end is None or not t_end > 0:
            raise ValueError("t_end must be positive")
        times = np.linspace(0.0, t_end, n_samples)
    times = np.asarray(times, dtype=float)
    t_end = float(times[-1])

    sol = solve_ivp(liouvillian_rhs(ops), (times[0], t_end), rho0.ravel(),
                    method="DOP853", t_eval=times, rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        raise RuntimeError(f"master-equation integration failed: {sol.message}")

    trace_bound = 1e-8 * max(1.0, t_end * params.zeta)
    top0 = top_level_populations(rho0, cfg)
    out = []
    for t, y in zip(sol.t, sol.y.T):
        rho = y.reshape(cfg.dim, cfg.dim)
        rho = 0.5 * (rho + rho.conj().T)
        drift = abs(np.trace(rho).real - np.trace(rho0).real)
        if drift > trace_bound:
            raise TraceDriftError(f"trace drifted by {drift:.3e} at t={t!r} "
                                  f"(bound {trace_bound:.3e})")
        for mode, p, p0 in zip(("cavity", "atomic"), top_level_populations(rho, cfg), top0):
            if p - p0 > leak_tol:
                raise TruncationError(mode, p, t)
        out.append((float(t), rho))
    return out


def check_density_matrix(rho, herm_tol=1e-12, trace_tol=1e-10, pos_tol=1e-8):
    """Return a list of violated density-matrix invariants (empty if valid)."""
    problems = []
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        problems.append(f"non-Hermitian by {herm:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1) > trace_tol:
        problems.append(f"trace {tr!r}")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lam < -pos_tol:
        problems.append(f"smallest eigenvalue {lam:.3e}")
    return problems


def trace_distance(rho, sigma) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho - sigma))))


def lindblad_moments(params: SystemParams, cfg: FockConfig = FockConfig(), rho0=None,
                     times=None, t_end=None, n_samples=201, tol=1e-10):
    """Moments along a master-equation trajectory, shape ``(len(times), 10)``."""
    ops = build_operators(params, cfg)
    series = lindblad_evolve(params, cfg, rho0, t_end=t_end, tol=tol,
                             times=times, n_samples=n_samples)
    times = np.array([t for t, _ in series])
    return times, np.array([extract_moments(rho, ops) for _, rho in series])


def convergence_check(params: SystemParams, cfg: FockConfig, times, tol=1e-8,
                      by: int = 2):
    """Re-run from vacuum with both dimensions enlarged by ``by``.

    Returns ``(max_abs_difference, passed)`` over all moments and times.
    """
    _, small = lindblad_moments(params, cfg, times=times)
    _, large = lindblad_moments(params, cfg.enlarged(by), times=times)
    diff = float(np.max(np.abs(small - large)))
    return diff, diff <= tol


@dataclass(frozen=True)
class GroundState:
    energy: float
    state: np.ndarray
    overlap: complex  # <0,0|E0>
    deficit: float  # 1 - |<0,0|E0>|^2, summed from the other amplitudes
    entropy: float  # von Neumann entropy of either reduced mode (nats)
    gap: float


def entanglement_entropy(psi, cfg: FockConfig) -> float:
    schmidt = np.linalg.svd(np.asarray(psi).reshape(cfg.dim_c, cfg.dim_a),
                            compute_uv=False)
    p = schmidt ** 2
    p = p[p > 0]
    p = p / p.sum()
    return float(-np.sum(p * np.log(p)))


def ground_state(params: SystemParams, cfg: FockConfig = FockConfig()) -> GroundState:
    """Lowest eigenpair of the closed-system Hamiltonian (RWA if flagged)."""
    ops = build_operators(params, cfg)
    energies, vectors = scipy.linalg.eigh(ops.hamiltonian)
    psi = vectors[:, 0].astype(complex)
    # fix the global phase so <0,0|E0> is real and non-negative
    a00 = psi[0]
    if abs(a00) > 0:
        psi = psi * (abs(a00) / a00)
    gap = float(energies[1] - energies[0])
    if gap <= 1e-10 * max(1.0, float(np.max(np.abs(energies)))):
        warnings.warn(f"degenerate ground state (gap {gap:.3e}); "
                      "returning the lowest-index eigenvector", stacklevel=2)
    deficit = float(np.sum(np.abs(psi[1:]) ** 2))
    return GroundState(float(energies[0]), psi, complex(psi[0]), deficit,
                       entanglement_entropy(psi, cfg), gap)
