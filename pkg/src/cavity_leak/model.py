"""Physical parameters and the linear generator of the moment rate equations.

The ten real second moments of the two bosonic modes (cavity ``c`` and
collective atomic excitation ``S-``) obey a closed linear system
``dx/dt = A x + b``. All rates and frequencies are angular, in s^-1
(or in whatever reference unit the caller has rescaled to).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields, replace
from typing import NamedTuple

import numpy as np

MOMENT_NAMES = ("mu1", "mu2", "eta1", "eta2", "eta3", "eta4",
                "xi1", "xi2", "xi3", "xi4")
MU1, MU2, ETA1, ETA2, ETA3, ETA4, XI1, XI2, XI3, XI4 = range(10)
INDEX = {name: i for i, name in enumerate(MOMENT_NAMES)}


class MomentVector(NamedTuple):
    """The ten real expectation values, in canonical order.

    ``mu1 = <c+ c>``, ``mu2 = <S+ S->``, the ``eta`` are the mixed
    quadrature products and the ``xi`` the single-mode squeezing terms.
    """

    mu1: float = 0.0
    mu2: float = 0.0
    eta1: float = 0.0
    eta2: float = 0.0
    eta3: float = 0.0
    eta4: float = 0.0
    xi1: float = 0.0
    xi2: float = 0.0
    xi3: float = 0.0
    xi4: float = 0.0

    @classmethod
    def from_array(cls, x) -> "MomentVector":
        x = np.asarray(x, dtype=float)
        if x.shape != (10,):
            raise ValueError(f"expected 10 moments, got shape {x.shape}")
        return cls(*(float(v) for v in x))

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


VACUUM = MomentVector()


@dataclass(frozen=True)
class SystemParams:
    """Atom-cavity parameters.

    ``omega_c`` and ``omega_a`` are the bare cavity and atomic angular
    frequencies, ``g_c`` the single-atom coupling, ``kappa`` the cavity
    decay rate and ``gamma`` the single-atom decay rate. ``n_atoms`` atoms
    couple collectively, so the effective coupling is ``sqrt(N) g_c`` and
    the atomic decay rate is ``N gamma``.
    """

    omega_c: float
    omega_a: float
    g_c: float
    kappa: float
    gamma: float
    n_atoms: int = 1
    rotating_wave: bool = False

    @property
    def zeta(self) -> float:
        return self.kappa + self.n_atoms * self.gamma

    @property
    def coupling(self) -> float:
        """Collective coupling ``sqrt(N) g_c``."""
        return math.sqrt(self.n_atoms) * self.g_c

    @property
    def atomic_decay(self) -> float:
        """Collective atomic decay rate ``N gamma``."""
        return self.n_atoms * self.gamma

    @property
    def detuning(self) -> float:
        return self.omega_a - self.omega_c

    def scaled(self, factor: float) -> "SystemParams":
        """Multiply every rate and frequency by ``factor``.

        Time then runs in units of ``1/factor``: dividing by a reference
        frequency (``factor = 1/ref``) gives a well-conditioned system.
        """
        return replace(self, omega_c=self.omega_c * factor,
                       omega_a=self.omega_a * factor, g_c=self.g_c * factor,
                       kappa=self.kappa * factor, gamma=self.gamma * factor)

    def in_units_of(self, reference: float) -> "SystemParams":
        return self.scaled(1.0 / reference)

    def with_rwa(self, flag: bool = True) -> "SystemParams":
        return replace(self, rotating_wave=flag)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def digest(self) -> str:
        text = ",".join(f"{k}={v!r}" for k, v in self.as_dict().items())
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def validate_params(params: SystemParams) -> SystemParams:
    """Check the parameter invariants; raise ``ValueError`` naming the field."""
    for name in ("omega_c", "omega_a", "g_c", "kappa", "gamma"):
        value = getattr(params, name)
        if not isinstance(value, (int, float, np.floating, np.integer)) \
                or isinstance(value, bool):
            raise ValueError(f"{name} must be a real number, got {value!r}")
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")
    for name in ("omega_c", "omega_a"):
        if getattr(params, name) <= 0:
            raise ValueError(f"{name} must be positive, got {getattr(params, name)!r}")
    for name in ("g_c", "kappa", "gamma"):
        if getattr(params, name) < 0:
            raise ValueError(f"{name} must be non-negative, got {getattr(params, name)!r}")
    n = params.n_atoms
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n_atoms must be an integer >= 1, got {n!r}")
    return params


class MomentGenerator(NamedTuple):
    """``dx/dt = A x + b`` for the canonical moment ordering."""

    A: np.ndarray
    b: np.ndarray

    def rhs(self, t, x):
        return self.A @ x + self.b

    def inf_norm(self) -> float:
        return float(np.abs(self.A).sum(axis=1).max())


def build_generator(params: SystemParams) -> MomentGenerator:
    """Rate equations including the counter-rotating interaction terms."""
    validate_params(params)
    if params.rotating_wave:
        raise ValueError("rotating_wave=True: use build_rwa_generator")
    G = params.coupling
    wc, wa = params.omega_c, params.omega_a
    k, NG = params.kappa, params.atomic_decay
    half = 0.5 * params.zeta

    A = np.zeros((10, 10))
    b = np.zeros(10)

    A[MU1, ETA1] = G
    A[MU1, MU1] = -k

    A[MU2, ETA2] = G
    A[MU2, MU2] = -NG

    b[ETA1] = 2 * G
    A[ETA1, MU2] = 4 * G
    A[ETA1, XI4] = 2 * G
    A[ETA1, ETA3] = wa
    A[ETA1, ETA4] = wc
    A[ETA1, ETA1] = -half

    b[ETA2] = 2 * G
    A[ETA2, MU1] = 4 * G
    A[ETA2, XI2] = 2 * G
    A[ETA2, ETA4] = wa
    A[ETA2, ETA3] = wc
    A[ETA2, ETA2] = -half

    A[ETA3, XI1] = -2 * G
    A[ETA3, XI3] = -2 * G
    A[ETA3, ETA1] = -wa
    A[ETA3, ETA2] = -wc
    A[ETA3, ETA3] = -half

    A[ETA4, ETA2] = -wa
    A[ETA4, ETA1] = -wc
    A[ETA4, ETA4] = -half

    A[XI1, ETA4] = 2 * G
    A[XI1, XI2] = 2 * wc
    A[XI1, XI1] = -k

    A[XI2, ETA1] = -2 * G
    A[XI2, XI1] = -2 * wc
    A[XI2, XI2] = -k

    A[XI3, ETA4] = 2 * G
    A[XI3, XI4] = 2 * wa
    A[XI3, XI3] = -NG

    A[XI4, ETA2] = -2 * G
    A[XI4, XI3] = -2 * wa
    A[XI4, XI4] = -NG

    return MomentGenerator(A, b)


def build_rwa_generator(params: SystemParams) -> MomentGenerator:
    """Rate equations for the Jaynes-Cummings interaction ``G (c S+ + c+ S-)``.

    Obtained from the Heisenberg-adjoint master equation with the
    excitation-conserving coupling only. In complex form, with
    ``P = <S- c>`` and ``Q = <S- c+>``::

        dQ/dt = -(i (wa - wc) + zeta/2) Q - i G (mu1 - mu2)
        dP/dt = -(i (wa + wc) + zeta/2) P - i G (<c c> + <S- S->)
        d<c c>/dt = -(2 i wc + kappa) <c c> - 2 i G P

    and the analogous atomic equation; rewriting ``P``, ``Q`` through
    ``eta1..eta4`` gives the rows below. No constant source appears.
    """
    validate_params(params)
    G = params.coupling
    wc, wa = params.omega_c, params.omega_a
    k, NG = params.kappa, params.atomic_decay
    half = 0.5 * params.zeta

    A = np.zeros((10, 10))

    A[MU1, ETA1] = 0.5 * G
    A[MU1, ETA2] = -0.5 * G
    A[MU1, MU1] = -k

    A[MU2, ETA1] = -0.5 * G
    A[MU2, ETA2] = 0.5 * G
    A[MU2, MU2] = -NG

    A[ETA1, MU1] = -2 * G
    A[ETA1, MU2] = 2 * G
    A[ETA1, XI2] = G
    A[ETA1, XI4] = G
    A[ETA1, ETA3] = wa
    A[ETA1, ETA4] = wc
    A[ETA1, ETA1] = -half

    A[ETA2, MU1] = 2 * G
    A[ETA2, MU2] = -2 * G
    A[ETA2, XI2] = G
    A[ETA2, XI4] = G
    A[ETA2, ETA3] = wc
    A[ETA2, ETA4] = wa
    A[ETA2, ETA2] = -half

    A[ETA3, XI1] = -G
    A[ETA3, XI3] = -G
    A[ETA3, ETA1] = -wa
    A[ETA3, ETA2] = -wc
    A[ETA3, ETA3] = -half

    A[ETA4, XI1] = -G
    A[ETA4, XI3] = -G
    A[ETA4, ETA1] = -wc
    A[ETA4, ETA2] = -wa
    A[ETA4, ETA4] = -half

    A[XI1, ETA3] = G
    A[XI1, ETA4] = G
    A[XI1, XI2] = 2 * wc
    A[XI1, XI1] = -k

    A[XI2, ETA1] = -G
    A[XI2, ETA2] = -G
    A[XI2, XI1] = -2 * wc
    A[XI2, XI2] = -k

    A[XI3, ETA3] = G
    A[XI3, ETA4] = G
    A[XI3, XI4] = 2 * wa
    A[XI3, XI3] = -NG

    A[XI4, ETA1] = -G
    A[XI4, ETA2] = -G
    A[XI4, XI3] = -2 * wa
    A[XI4, XI4] = -NG

    return MomentGenerator(A, np.zeros(10))


def generator_for(params: SystemParams) -> MomentGenerator:
    """Dispatch on ``params.rotating_wave``."""
    if params.rotating_wave:
        return build_rwa_generator(params)
    return build_generator(params)


def rb_chip_cavity(n_atoms: int = 10_000, rotating_wave: bool = False) -> SystemParams:
    """Rb D2-line atoms in a fibre-gap chip cavity (rates in s^-1)."""
    return SystemParams(omega_c=384.2e12, omega_a=384.2e12, g_c=6.1e8,
                        kappa=1.3e10, gamma=1.9e7, n_atoms=n_atoms,
                        rotating_wave=rotating_wave)


def scaled_regime(rotating_wave: bool = False) -> SystemParams:
    """Desk-scale validation point: ``sqrt(N) g_c = 1``, ``omega = 10``, ``kappa = N gamma = 1``."""
    return SystemParams(omega_c=10.0, omega_a=10.0, g_c=1.0, kappa=1.0,
                        gamma=1.0, n_atoms=1, rotating_wave=rotating_wave)
