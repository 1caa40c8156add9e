from dataclasses import replace

import numpy as np
import pytest

from cavity_leak.dynamics import evolve, steady_state
from cavity_leak.fock import (FockConfig, TruncationError, build_operators, check_density_matrix,
                              convergence_check, destroy, entanglement_entropy,
                              extract_moments, fock_state, ground_state, lindblad_evolve,
                              lindblad_moments, projector, state_moments, trace_distance,
                              vacuum_density)
from cavity_leak.model import INDEX, SystemParams, build_generator, scaled_regime


def test_config_validation():
    with pytest.raises(ValueError):
        FockConfig(1, 4)
    with pytest.raises(ValueError):
        FockConfig(64, 64)
    cfg = FockConfig(3, 5)
    assert cfg.dim == 15 and cfg.index(2, 4) == 14
    assert cfg.enlarged(2) == FockConfig(5, 7)


def test_destroy():
    a = destroy(4).toarray()
    np.testing.assert_allclose(np.diag(a, 1), np.sqrt([1, 2, 3]))
    comm = a @ a.T - a.T @ a
    # [a, a^dag] = 1 except on the truncated top level
    np.testing.assert_allclose(np.diag(comm)[:-1], 1.0)


def test_free_spectrum():
    p = SystemParams(2.0, 3.0, 0.0, 0.1, 0.1)
    ops = build_operators(p, FockConfig(2, 2))
    np.testing.assert_allclose(np.linalg.eigvalsh(ops.hamiltonian), [0, 2, 3, 5], atol=1e-15)


def test_hamiltonian_is_hermitian(scaled):
    for p in (scaled, scaled.with_rwa()):
        h = build_operators(p, FockConfig(4, 5)).hamiltonian
        np.testing.assert_allclose(h, h.conj().T)


def test_rwa_conserves_excitations(scaled):
    cfg = FockConfig(5, 5)
    ops = build_operators(scaled.with_rwa(), cfg)
    number = np.diag([nc + na for nc in range(5) for na in range(5)]).astype(float)
    h = ops.hamiltonian
    np.testing.assert_allclose(h @ number - number @ h, 0, atol=1e-13)


def test_moments_of_fock_states(scaled):
    cfg = FockConfig(4, 4)
    ops = build_operators(scaled, cfg)
    assert np.all(np.asarray(extract_moments(vacuum_density(cfg), ops)) == 0)
    x = extract_moments(projector(fock_state(cfg, 1, 0)), ops)
    assert x.mu1 == pytest.approx(1.0) and x.mu2 == 0.0
    np.testing.assert_allclose(np.asarray(x)[2:], 0, atol=1e-15)
    y = extract_moments(projector(fock_state(cfg, 2, 3)), ops)
    assert (y.mu1, y.mu2) == pytest.approx((2.0, 3.0))


def test_state_moments_match_density(scaled):
    cfg = FockConfig(4, 4)
    ops = build_operators(scaled, cfg)
    rng = np.random.default_rng(5)
    psi = rng.normal(size=(cfg.dim, 3)) + 1j * rng.normal(size=(cfg.dim, 3))
    psi /= np.linalg.norm(psi, axis=0)
    cols = state_moments(psi, ops)
    for j in range(3):
        np.testing.assert_allclose(cols[j], extract_moments(projector(psi[:, j]), ops),
                                   atol=1e-13)


def test_imaginary_moment_rejected(scaled):
    cfg = FockConfig(3, 3)
    ops = build_operators(scaled, cfg)
    rho = vacuum_density(cfg).astype(complex)
    rho[cfg.index(1, 1), 0] = 0.3j  # non-Hermitian two-excitation coherence
    with pytest.raises(ValueError):
        extract_moments(rho, ops)


def test_two_mode_ground_energy():
    # two linearly coupled oscillators have closed-form normal modes
    wc, wa, G = 1.0, 1.3, 0.3
    p = SystemParams(wc, wa, G, 0.1, 0.1)
    gs = ground_state(p, FockConfig(22, 22))
    s = 0.5 * (wc ** 2 + wa ** 2)
    root = np.sqrt(0.25 * (wc ** 2 - wa ** 2) ** 2 + 4 * G ** 2 * wc * wa)
    exact = 0.5 * (np.sqrt(s + root) + np.sqrt(s - root) - wc - wa)
    assert gs.energy == pytest.approx(exact, abs=1e-10)


def test_ground_state_limits(scaled):
    cfg = FockConfig(6, 6)
    free = ground_state(replace(scaled, g_c=0.0), cfg)
    assert free.deficit == 0.0 and free.entropy == 0.0 and free.energy == 0.0
    rwa = ground_state(scaled.with_rwa(), cfg)
    assert rwa.deficit < 1e-20 and rwa.overlap.real == pytest.approx(1.0)
    full = ground_state(scaled, cfg)
    assert full.deficit > 0 and full.entropy > 0 and full.energy < 0
    assert full.overlap.imag == 0.0 and full.overlap.real > 0


def test_degenerate_ground_state_warns():
    p = SystemParams(1.0, 1.0, 0.0, 0.1, 0.1)
    # with the free part switched off every state is degenerate
    ops_cfg = FockConfig(2, 2)
    with pytest.warns(UserWarning, match="degenerate"):
        ground_state(replace(p, omega_c=1e-30, omega_a=1e-30), ops_cfg)


def test_entropy_of_bell_pair():
    cfg = FockConfig(2, 2)
    psi = (fock_state(cfg, 0, 1) + fock_state(cfg, 1, 0)) / np.sqrt(2)
    assert entanglement_entropy(psi, cfg) == pytest.approx(np.log(2))


def test_mixed_state_decays_to_vacuum():
    p = SystemParams(1.0, 1.0, 0.0, 1.0, 1.0, rotating_wave=True)
    cfg = FockConfig(3, 3)
    rho0 = np.eye(cfg.dim) / cfg.dim
    series = lindblad_evolve(p, cfg, rho0, t_end=40.0, n_samples=5, tol=1e-11)
    assert trace_distance(series[-1][1], vacuum_density(cfg)) < 1e-9


def test_rwa_vacuum_is_stationary():
    p = scaled_regime(rotating_wave=True)
    cfg = FockConfig(4, 4)
    vac = vacuum_density(cfg)
    for _, rho in lindblad_evolve(p, cfg, vac, t_end=10.0, n_samples=11):
        assert trace_distance(rho, vac) < 1e-12


def test_density_matrix_invariants(scaled):
    cfg = FockConfig(6, 6)
    for t, rho in lindblad_evolve(scaled, cfg, t_end=10.0, n_samples=21):
        assert check_density_matrix(rho) == [], t


def test_check_density_matrix_flags():
    rho = np.diag([1.2, -0.2]).astype(complex)
    problems = check_density_matrix(rho)
    assert any("eigenvalue" in s for s in problems)
    rho = np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex)
    assert any("Hermitian" in s for s in check_density_matrix(rho))


def test_truncation_detected(scaled):
    with pytest.raises(TruncationError) as err:
        lindblad_evolve(scaled, FockConfig(2, 2), t_end=5.0, n_samples=11)
    assert err.value.mode in ("cavity", "atomic")


def test_convergence_certificate(scaled):
    diff, ok = convergence_check(scaled, FockConfig(8, 8), np.linspace(0, 5, 11))
    assert ok and diff < 1e-8


def test_master_equation_matches_moments(scaled):
    times = np.linspace(0, 5, 26)
    _, oracle = lindblad_moments(scaled, FockConfig(8, 8), times=times)
    moments = evolve(build_generator(scaled), times=times).states
    assert np.max(np.abs(moments - oracle)) < 1e-6


def test_master_equation_reaches_moment_steady_state(scaled):
    # relaxation rate is zeta / 2 = 1 here
    times = np.linspace(0, 30, 4)
    _, oracle = lindblad_moments(scaled, FockConfig(8, 8), times=times)
    ss = np.asarray(steady_state(build_generator(scaled), scaled).steady)
    np.testing.assert_allclose(oracle[-1], ss, atol=1e-8)
    assert oracle[-1, INDEX["mu1"]] == pytest.approx(0.0051942669, rel=1e-6)
