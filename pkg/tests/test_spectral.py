"""Spectral representation: parameters, packets, norms, Plancherel."""

import numpy as np
import pytest

from couette_euler.spectral import (EtaGrid, GaussianPacket, ModeKey,
                                    PhysParams, SpectralField, aniso_norm,
                                    make_packet, physical_l2_norm,
                                    validate_params, weight_inequality_ratio)

from conftest import constant_field, random_hermitian_field


class TestParams:
    def test_standard_values_accepted(self):
        p = PhysParams(gamma=1.4, mach=1.0)
        assert validate_params(p) is p

    def test_gamma_boundary_rejected(self):
        with pytest.raises(ValueError):
            PhysParams(gamma=1.0, mach=1.0)

    def test_mach_boundary_rejected(self):
        with pytest.raises(ValueError):
            PhysParams(gamma=2.0, mach=0.0)

    def test_mode_key_rejects_zero(self):
        with pytest.raises(ValueError):
            ModeKey(0, 1.0)


class TestEtaGrid:
    def test_spacing(self):
        g = EtaGrid(-2.0, 2.0, 5)
        assert g.spacing == pytest.approx(1.0)
        assert np.allclose(g.points, [-2, -1, 0, 1, 2])

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            EtaGrid(-1.0, 2.0, 8)

    def test_symmetry_maps_points_to_points(self):
        g = EtaGrid(-3.0, 3.0, 16)  # even count, no eta=0 point
        assert np.allclose(-g.points[::-1], g.points)


class TestPackets:
    def test_single_harmonic_real_positive(self, grid_small):
        f = make_packet(GaussianPacket({1: 1.0}), grid_small)
        assert set(f.k_list) == {-1, 1}
        row = f.row(1)
        assert np.all(row.real > 0)
        assert np.max(np.abs(row.imag)) == 0.0
        assert f.hermitian_defect() < 1e-15

    def test_zero_amplitude_gives_zero_field(self, grid_small):
        f = make_packet(GaussianPacket({1: 0.0, 2: 0.0}), grid_small)
        assert np.all(f.amp == 0)

    def test_center_shift_is_pure_phase(self, grid_small):
        f0 = make_packet(GaussianPacket({1: 1.0}, center=0.0), grid_small)
        f2 = make_packet(GaussianPacket({1: 1.0}, center=2.0), grid_small)
        eta = grid_small.points
        assert np.allclose(np.abs(f2.row(1)), np.abs(f0.row(1)))
        assert np.allclose(f2.row(1), f0.row(1) * np.exp(-2j * eta))

    def test_zero_harmonic_rejected(self):
        with pytest.raises(ValueError):
            GaussianPacket({0: 1.0})

    def test_nonpositive_width_rejected(self):
        with pytest.raises(ValueError):
            GaussianPacket({1: 1.0}, width=0.0)

    def test_hermitian_with_complex_amplitude(self, grid_small):
        f = make_packet(GaussianPacket({1: 0.3 - 0.8j, 3: 1j}, center=0.7),
                        grid_small)
        assert f.hermitian_defect() < 1e-15


class TestAnisoNorm:
    def test_zero_field(self, grid_small):
        f = SpectralField.zeros(grid_small, (1, -1))
        assert aniso_norm(f, 0.3, -0.7) == 0.0

    def test_unit_strips(self):
        # fhat = 1 on k = +/-1 for eta in [-1, 1]: four unit-mass strips
        grid = EtaGrid(-1.0, 1.0, 41)
        f = constant_field(grid, {1: 1.0, -1: 1.0})
        assert aniso_norm(f, 0.0, 0.0) == pytest.approx(2.0, abs=1e-12)

    def test_gaussian_vs_fine_quadrature(self):
        # independent oracle: trapezoid of the analytic profile at 10x the
        # grid resolution
        grid = EtaGrid(-12.0, 12.0, 241)
        w, c, a = 1.3, 0.4, 0.9
        f = make_packet(GaussianPacket({1: a}, center=c, width=w), grid)
        s1, s2 = -0.5, 1.0
        fine = np.linspace(-12.0, 12.0, 2401)
        prof2 = (a * np.sqrt(2 * np.pi) * w) ** 2 * np.exp(-w ** 2 * fine ** 2)
        weight = (1 + 1) ** s1 * (1 + fine ** 2) ** s2
        expected = np.sqrt(2.0 * np.trapezoid(weight * prof2, fine))
        assert aniso_norm(f, s1, s2) == pytest.approx(expected, rel=1e-6)

    def test_monotone_in_indices(self, grid_small):
        rng = np.random.default_rng(0)
        f = random_hermitian_field(grid_small, [1, 2], rng)
        vals = [aniso_norm(f, s1, s2)
                for s1, s2 in [(-1, -1), (-1, 0), (0, 0), (0, 1), (1, 1)]]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_isotropic_flag(self, grid_small):
        rng = np.random.default_rng(1)
        f = random_hermitian_field(grid_small, [1], rng)
        eta = grid_small.points
        ref = np.sqrt(sum(
            np.trapezoid((1.0 + k * k + eta ** 2) ** 0.5
                         * np.abs(f.row(k)) ** 2, eta)
            for k in f.k_list))
        assert aniso_norm(f, 0.5, 0.0, isotropic=True) == pytest.approx(ref)


class TestPlancherel:
    def test_packet_norm_closed_form(self):
        # ||2 cos(x) g(y)||^2 = 4 pi^{3/2} w for g = exp(-y^2/(2w^2))
        grid = EtaGrid(-14.0, 14.0, 301)
        w = 1.2
        f = make_packet(GaussianPacket({1: 1.0}, width=w), grid)
        assert aniso_norm(f, 0.0, 0.0) ** 2 == pytest.approx(
            4.0 * np.pi ** 1.5 * w, rel=1e-10)

    def test_physical_reconstruction_matches(self):
        grid = EtaGrid(-14.0, 14.0, 301)
        f = make_packet(GaussianPacket({1: 0.8 + 0.3j, 2: 0.5}, center=0.5,
                                       width=1.1), grid)
        spectral = aniso_norm(f, 0.0, 0.0)
        physical = physical_l2_norm(f, nx=16, y=np.linspace(-12, 12, 3001))
        assert physical == pytest.approx(spectral, rel=1e-4)


class TestWeightInequality:
    def test_ratio_bounded_and_reported(self, grid_small):
        rng = np.random.default_rng(2)
        f = random_hermitian_field(grid_small, [1, 2], rng)
        worst = 0.0
        for beta in (0.5, 1.0):
            for t in (0.0, 0.5, 2.0, 10.0, 100.0):
                r = weight_inequality_ratio(f, s=0.0, beta=beta, t=t)
                worst = max(worst, r)
                assert r >= 0.0
        print(f"weight inequality empirical constant: {worst:.4f}")
        assert worst <= 2.0


class TestFieldAlgebra:
    def test_hermitian_preserved_by_arithmetic(self, grid_small):
        rng = np.random.default_rng(3)
        f = random_hermitian_field(grid_small, [1], rng)
        g = random_hermitian_field(grid_small, [1], rng)
        assert (f + g).hermitian_defect() < 1e-14
        assert (2.5 * f - g / 3.0).hermitian_defect() < 1e-14

    def test_grid_mismatch_rejected(self, grid_small):
        other = EtaGrid(-10.0, 10.0, 101)
        f = SpectralField.zeros(grid_small, (1, -1))
        g = SpectralField.zeros(other, (1, -1))
        with pytest.raises(ValueError):
            _ = f + g
