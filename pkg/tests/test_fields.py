"""Invariants, reconstruction, Helmholtz spectra, frequency relabeling."""

import numpy as np
import pytest

from couette_euler.spectral import (EtaGrid, PhysParams, SpectralField,
                                    aniso_norm)
from couette_euler.fields import (compressible_block_norms, delta_from_fields,
                                  helmholtz_spectra, invariants_from_initial,
                                  reconstruct_fields, to_physical_frequency,
                                  velocity_norms)
from couette_euler.dynamics import StepPolicy, evolve_full_modes

from conftest import constant_field, random_hermitian_field


class TestInvariants:
    def test_zero_inputs(self, grid_small, params14):
        z = SpectralField.zeros(grid_small, (1, -1))
        inv = invariants_from_initial(z, z, z, z, params14)
        assert np.all(inv.beta_in.amp == 0)
        assert np.all(inv.gamma_in.amp == 0)
        assert np.all(inv.sigma_in.amp == 0)

    def test_componentwise_arithmetic(self, grid_small):
        params = PhysParams(1.4, 1.0)
        rho = constant_field(grid_small, {1: 1.0, -1: 1.0})
        omega = constant_field(grid_small, {1: 2.0, -1: 2.0})
        zero = SpectralField.zeros(grid_small, (-1, 1))
        inv = invariants_from_initial(rho, zero, omega, zero, params)
        assert np.allclose(inv.beta_in.row(1), 3.0)
        assert np.allclose(inv.gamma_in.row(1), 0.8)
        assert np.allclose(inv.sigma_in.row(1), 0.4)

    def test_sigma_cancellation(self, grid_small):
        params = PhysParams(2.0, 1.0)
        rho = constant_field(grid_small, {1: 0.7, -1: 0.7})
        zero = SpectralField.zeros(grid_small, (-1, 1))
        inv = invariants_from_initial(rho, zero, zero, rho, params)
        assert np.allclose(inv.sigma_in.amp, 0.0)

    def test_grid_mismatch_rejected(self, grid_small, params14):
        other = EtaGrid(-10.0, 10.0, 101)
        z1 = SpectralField.zeros(grid_small, (1, -1))
        z2 = SpectralField.zeros(other, (1, -1))
        with pytest.raises(ValueError):
            invariants_from_initial(z1, z1, z2, z1, params14)


class TestReconstruction:
    def test_zero_delta(self, grid_small):
        params = PhysParams(1.4, 1.0)
        rng = np.random.default_rng(0)
        rho = random_hermitian_field(grid_small, [1], rng)
        omega = random_hermitian_field(grid_small, [1], rng)
        theta = random_hermitian_field(grid_small, [1], rng)
        zero = SpectralField.zeros(grid_small, (-1, 1))
        inv = invariants_from_initial(rho, zero, omega, theta, params)
        _, _, om = reconstruct_fields(zero, inv, params)
        expected = (inv.beta_in + inv.gamma_in) / params.gamma
        assert np.allclose(om.amp, expected.amp)

    def test_reference_point(self, grid_small):
        params = PhysParams(2.0, 1.0)
        one = constant_field(grid_small, {1: 1.0, -1: 1.0})
        half = constant_field(grid_small, {1: 0.5, -1: 0.5})
        from couette_euler.fields import Invariants
        inv = Invariants(beta_in=one, gamma_in=one,
                         sigma_in=SpectralField.zeros(grid_small, (-1, 1)))
        r, th, om = reconstruct_fields(half, inv, params)
        assert np.allclose(om.amp, 0.5)
        assert np.allclose(r.amp, 0.5)
        assert np.allclose(th.amp, 0.5)

    def test_delta_identity_exact(self, grid_small, params14):
        rng = np.random.default_rng(1)
        fields = {n: random_hermitian_field(grid_small, [1, 2], rng)
                  for n in ("rho", "alpha", "omega", "theta")}
        inv = invariants_from_initial(fields["rho"], fields["alpha"],
                                      fields["omega"], fields["theta"],
                                      params14)
        delta = delta_from_fields(fields["rho"], fields["theta"], params14)
        r, th, om = reconstruct_fields(delta, inv, params14)
        back = delta_from_fields(r, th, params14)
        assert np.max(np.abs(back.amp - delta.amp)) < 1e-14
        assert np.max(np.abs(r.amp - fields["rho"].amp)) < 1e-14
        assert np.max(np.abs(om.amp - fields["omega"].amp)) < 1e-14


class TestHelmholtz:
    def test_rotational_only(self, grid_small):
        om = constant_field(grid_small, {1: 1.0, -1: 1.0})
        zero = SpectralField.zeros(grid_small, (-1, 1))
        v = helmholtz_spectra(om, zero, 0.0)
        i0 = np.argmin(np.abs(grid_small.points))  # eta = 0 point
        assert v.Pvx.row(1)[i0] == pytest.approx(0.0, abs=1e-14)
        assert v.Pvy.row(1)[i0] == pytest.approx(-1j, abs=1e-14)
        assert np.all(v.Qvx.amp == 0) and np.all(v.Qvy.amp == 0)

    def test_divergent_only(self, grid_small):
        a = constant_field(grid_small, {1: 1.0, -1: 1.0})
        zero = SpectralField.zeros(grid_small, (-1, 1))
        v = helmholtz_spectra(zero, a, 0.0)
        i0 = np.argmin(np.abs(grid_small.points))
        assert v.Qvx.row(1)[i0] == pytest.approx(-1j, abs=1e-14)
        assert v.Qvy.row(1)[i0] == pytest.approx(0.0, abs=1e-14)
        assert np.all(v.Pvx.amp == 0) and np.all(v.Pvy.amp == 0)

    def test_projection_identities(self, grid_small):
        rng = np.random.default_rng(2)
        om = random_hermitian_field(grid_small, [1, 3], rng)
        a = random_hermitian_field(grid_small, [1, 3], rng)
        t = 1.7
        v = helmholtz_spectra(om, a, t)
        eta = grid_small.points
        for i, k in enumerate(om.k_list):
            q = eta - k * t
            div_p = k * v.Pvx.amp[i] + q * v.Pvy.amp[i]
            curl_q = k * v.Qvy.amp[i] - q * v.Qvx.amp[i]
            assert np.max(np.abs(div_p)) < 1e-13
            assert np.max(np.abs(curl_q)) < 1e-13

    def test_hermitian_preserved(self, grid_small):
        rng = np.random.default_rng(3)
        om = random_hermitian_field(grid_small, [1, 2], rng)
        a = random_hermitian_field(grid_small, [1, 2], rng)
        v = helmholtz_spectra(om, a, 2.3)
        for f in (v.Pvx, v.Pvy, v.Qvx, v.Qvy):
            assert f.hermitian_defect() < 1e-13

    def test_norms_match_spectra(self, grid_small):
        rng = np.random.default_rng(4)
        om = random_hermitian_field(grid_small, [1, 2], rng)
        a = random_hermitian_field(grid_small, [1, 2], rng)
        t = 0.9
        v = helmholtz_spectra(om, a, t)
        pvx, pvy, qv = velocity_norms(om, a, t)
        assert aniso_norm(v.Pvx, 0, 0) == pytest.approx(pvx, rel=1e-12)
        assert aniso_norm(v.Pvy, 0, 0) == pytest.approx(pvy, rel=1e-12)
        qv_spectra = np.sqrt(aniso_norm(v.Qvx, 0, 0) ** 2
                             + aniso_norm(v.Qvy, 0, 0) ** 2)
        assert qv_spectra == pytest.approx(qv, rel=1e-12)


class TestPhysicalFrequency:
    def test_identity_at_t0(self, grid_small):
        rng = np.random.default_rng(5)
        f = random_hermitian_field(grid_small, [1], rng)
        sheared = to_physical_frequency(f, 0.0)
        assert np.allclose(sheared.xi(1), grid_small.points)
        assert np.allclose(sheared.row(1), f.row(1))

    def test_norm_is_exactly_preserved(self, grid_small):
        rng = np.random.default_rng(6)
        f = random_hermitian_field(grid_small, [1, 2], rng)
        sheared = to_physical_frequency(f, 7.3)
        assert sheared.l2_norm() == pytest.approx(aniso_norm(f, 0, 0),
                                                  rel=1e-14)

    def test_single_mode_relabeling(self):
        grid = EtaGrid(-5.0, 5.0, 101)
        f = SpectralField.zeros(grid, (1, -1))
        i3 = int(np.argmin(np.abs(grid.points - 3.0)))
        f.amp[f.index_of(1), i3] = 1.0
        sheared = to_physical_frequency(f, 2.0)
        assert sheared.sample(1, 1.0)[0] == pytest.approx(1.0)  # xi = 3 - 2

    def test_out_of_range_rejected(self, grid_small):
        f = SpectralField.zeros(grid_small, (1, -1))
        sheared = to_physical_frequency(f, 4.0)
        with pytest.raises(ValueError):
            sheared.sample(1, grid_small.eta_max)  # needs eta_max + 4


class TestAgainstDynamics:
    def test_invariants_conserved_along_full_evolution(self):
        grid = EtaGrid(-10.0, 10.0, 41)
        params = PhysParams(1.4, 0.8)
        rng = np.random.default_rng(7)
        fields = {n: random_hermitian_field(grid, [1], rng)
                  for n in ("rho", "alpha", "omega", "theta")}
        inv = invariants_from_initial(fields["rho"], fields["alpha"],
                                      fields["omega"], fields["theta"], params)
        y0 = np.stack([fields[n].row(1)
                       for n in ("rho", "alpha", "omega", "theta")])
        ts = np.linspace(0.0, 20.0, 11)
        out = evolve_full_modes(1.0, grid.points, y0, params, ts,
                                StepPolicy(base_dt=0.05, c_osc=0.1, tol=1e-6))
        g = params.gamma
        scale = np.max(np.abs(y0))
        for j in range(len(ts)):
            beta = out[j, 0] + out[j, 2]
            gam = out[j, 3] + (g - 1.0) * out[j, 2]
            sig = (g - 1.0) * out[j, 0] - out[j, 3]
            assert np.max(np.abs(beta - inv.beta_in.row(1))) < 1e-10 * scale
            assert np.max(np.abs(gam - inv.gamma_in.row(1))) < 1e-10 * scale
            assert np.max(np.abs(sig - inv.sigma_in.row(1))) < 1e-10 * scale

    def test_compressible_block_identity(self, grid_small, params14):
        rng = np.random.default_rng(8)
        a = random_hermitian_field(grid_small, [1, 2], rng)
        delta = random_hermitian_field(grid_small, [1, 2], rng)
        left, right = compressible_block_norms(a, delta, 3.1, params14)
        assert left == pytest.approx(right, rel=1e-12)

    def test_density_separation_identity(self, grid_small):
        # gamma/M rho = x1 + y1 with x1 = ((gamma-1) rho - theta)/M,
        # y1 = (rho + theta)/M, hence equal L2 norms
        params = PhysParams(1.7, 0.6)
        rng = np.random.default_rng(9)
        rho = random_hermitian_field(grid_small, [1], rng)
        theta = random_hermitian_field(grid_small, [1], rng)
        g, m = params.gamma, params.mach
        x1 = ((g - 1.0) * rho - theta) / m
        y1 = (rho + theta) / m
        lhs = aniso_norm(g / m * rho, 0, 0)
        rhs = aniso_norm(x1 + y1, 0, 0)
        assert lhs == pytest.approx(rhs, rel=1e-10)
