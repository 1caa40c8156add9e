import numpy as np
import pytest

from cavity_leak.fock import build_operators, extract_moments, liouvillian_rhs
from cavity_leak.model import rb_chip_cavity, scaled_regime


@pytest.fixture
def scaled():
    return scaled_regime()


@pytest.fixture
def chip():
    return rb_chip_cavity(10_000)


def random_low_fock_state(cfg, n_max, rng):
    """Random density matrix supported on n_c, n_a <= n_max.

    Second moments of such a state and of its time derivative are
    unaffected by the truncation as long as n_max + 2 < dim.
    """
    keep = np.zeros((cfg.dim_c, cfg.dim_a), dtype=bool)
    keep[: n_max + 1, : n_max + 1] = True
    idx = np.flatnonzero(keep.ravel())
    x = rng.normal(size=(idx.size, idx.size)) + 1j * rng.normal(size=(idx.size, idx.size))
    block = x @ x.conj().T
    rho = np.zeros((cfg.dim, cfg.dim), dtype=complex)
    rho[np.ix_(idx, idx)] = block / np.trace(block)
    return rho


def liouvillian_moment_derivative(params, rho, cfg):
    """d<O>/dt = Tr(O L[rho]) straight from the master equation."""
    ops = build_operators(params, cfg)
    drho = liouvillian_rhs(ops)(0.0, rho.ravel()).reshape(cfg.dim, cfg.dim)
    return np.array(extract_moments(drho, ops)), np.array(extract_moments(rho, ops))


@pytest.fixture
def derivative_oracle():
    return liouvillian_moment_derivative


@pytest.fixture
def low_fock_state():
    return random_low_fock_state


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REPORT
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
