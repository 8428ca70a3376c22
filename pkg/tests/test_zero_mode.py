"""x-average dynamics: marcher, d'Alembert reference, recovery, energy."""

import numpy as np
import pytest

from couette_euler.spectral import PhysParams
from couette_euler.zero_mode import (ZeroModeState, dalembert_alpha,
                                     dalembert_reference, evolve_zero_mode,
                                     recover_zero_fields, wave_energy,
                                     zero_mode_trajectory)


def test_zero_state_stays_zero(params14):
    s0 = ZeroModeState.gaussian(L=10.0, n=256)
    out = evolve_zero_mode(s0, params14, t_end=2.0)
    for p in out.profiles():
        assert np.all(p == 0.0)


def test_cfl_violation_rejected(params14):
    s0 = ZeroModeState.gaussian(L=10.0, n=256, rho_amp=1e-9)
    with pytest.raises(ValueError):
        evolve_zero_mode(s0, params14, t_end=1.0, dt=1.0)


def test_boundary_contamination_detected():
    params = PhysParams(1.4, 1.0)
    # domain far too small for the horizon
    s0 = ZeroModeState.gaussian(L=4.0, n=512, rho_amp=1.0, width=1.0)
    with pytest.raises(RuntimeError):
        evolve_zero_mode(s0, params, t_end=3.5)


def test_plateau_evolves_linearly():
    # flat-center profile: dyy ~ 0 there, so rho0 and theta0 slide linearly
    # with slopes -alpha0 and -(gamma-1) alpha0
    params = PhysParams(1.4, 1.0)
    L, n = 40.0, 4096
    y = np.linspace(-L, L, n)
    plateau = np.exp(-((y / 25.0) ** 8))
    a0 = 0.3
    s0 = ZeroModeState(L=L, rho0=0.5 * plateau, alpha0=a0 * plateau,
                       omega0=np.zeros(n), theta0=0.2 * plateau)
    t_end = 1.0
    out = evolve_zero_mode(s0, params, t_end)
    mid = n // 2
    assert out.rho0[mid] == pytest.approx(0.5 - a0 * t_end, abs=1e-6)
    assert out.theta0[mid] == pytest.approx(
        0.2 - (params.gamma - 1.0) * a0 * t_end, abs=1e-6)
    assert out.omega0[mid] == pytest.approx(a0 * t_end, abs=1e-6)


class TestDalembert:
    def test_initial_time_reproduces_data(self):
        params = PhysParams(1.4, 1.0)
        s0 = ZeroModeState.gaussian(L=30.0, n=1024, rho_amp=0.6,
                                    theta_amp=0.4, width=2.0)
        ref = dalembert_reference(s0, params, 0.0)
        assert np.max(np.abs(ref - (s0.rho0 + s0.theta0))) < 1e-13

    def test_two_half_pulses(self):
        # alpha0 = 0, M = 1: (rho0+theta0)(t) = half pulses at y = +/- t
        params = PhysParams(1.4, 1.0)
        w = 2.0
        s0 = ZeroModeState.gaussian(L=40.0, n=2048, rho_amp=1.0, width=w)
        t = 3.0
        ref = dalembert_reference(s0, params, t)
        y = s0.y
        exact = 0.5 * (np.exp(-(y - t) ** 2 / (2 * w ** 2))
                       + np.exp(-(y + t) ** 2 / (2 * w ** 2)))
        assert np.max(np.abs(ref - exact)) < 1e-9

    def test_marcher_matches_closed_form(self):
        params = PhysParams(1.4, 1.0)
        w = 24.0
        L = 12.43 * w + 2.0
        s0 = ZeroModeState.gaussian(L=L, n=4096, rho_amp=0.7, theta_amp=0.3,
                                    width=w)
        out = evolve_zero_mode(s0, params, t_end=2.0)
        ref = dalembert_reference(s0, params, 2.0)
        assert np.max(np.abs(out.rho0 + out.theta0 - ref)) < 1e-6

    def test_nonzero_velocity_term(self):
        # alpha0 != 0 exercises the integral term of the closed form
        params = PhysParams(1.4, 2.0)
        w = 24.0
        L = 12.43 * w + 2.0
        s0 = ZeroModeState.gaussian(L=L, n=4096, rho_amp=0.5, alpha_amp=0.2,
                                    theta_amp=0.1, width=w)
        out = evolve_zero_mode(s0, params, t_end=2.0)
        ref = dalembert_reference(s0, params, 2.0)
        assert np.max(np.abs(out.rho0 + out.theta0 - ref)) < 1e-6

    def test_alpha_satisfies_its_own_wave_equation(self):
        params = PhysParams(1.4, 1.0)
        w = 24.0
        L = 12.43 * w + 2.0
        s0 = ZeroModeState.gaussian(L=L, n=4096, alpha_amp=0.5, width=w)
        out = evolve_zero_mode(s0, params, t_end=2.0)
        ref = dalembert_alpha(s0, params, 2.0)
        assert np.max(np.abs(out.alpha0 - ref)) < 1e-6


class TestRecovery:
    def test_unchanged_density_means_unchanged_fields(self, params14):
        s0 = ZeroModeState.gaussian(L=20.0, n=512, rho_amp=0.5, omega_amp=0.3,
                                    theta_amp=0.2, width=2.0)
        om, th = recover_zero_fields(s0.rho0, s0, params14)
        assert np.allclose(om, s0.omega0)
        assert np.allclose(th, s0.theta0)

    def test_gamma_near_one_freezes_theta(self):
        params = PhysParams(1.0 + 1e-9, 1.0)
        s0 = ZeroModeState.gaussian(L=20.0, n=512, rho_amp=0.5, theta_amp=0.2,
                                    width=2.0)
        rho_t = s0.rho0 * 0.3  # any change in rho0
        _, th = recover_zero_fields(rho_t, s0, params)
        assert np.max(np.abs(th - s0.theta0)) < 1e-9

    def test_recovered_matches_directly_evolved(self):
        params = PhysParams(1.5, 1.0)
        s0 = ZeroModeState.gaussian(L=60.0, n=4096, rho_amp=0.6,
                                    alpha_amp=0.2, theta_amp=0.3, width=3.0)
        out = evolve_zero_mode(s0, params, t_end=2.0)
        om, th = recover_zero_fields(out.rho0, s0, params)
        assert np.max(np.abs(om - out.omega0)) < 1e-8
        assert np.max(np.abs(th - out.theta0)) < 1e-8


def test_wave_energy_conserved():
    params = PhysParams(1.4, 1.0)
    w = 24.0
    L = 12.43 * w + 2.0
    s0 = ZeroModeState.gaussian(L=L, n=4096, rho_amp=0.7, theta_amp=0.3,
                                width=w)
    states = zero_mode_trajectory(s0, params, [0.7, 1.4, 2.0])
    e0 = wave_energy(s0, params)
    for s in states:
        assert abs(wave_energy(s, params) - e0) / e0 < 1e-6
