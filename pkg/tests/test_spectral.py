"""Tests for the Dirichlet spectral calculus on the rectangle."""

import numpy as np
import pytest
import scipy.integrate

from sqgbounds.spectral import (
    DomainSpec,
    GridField,
    SpectralField,
    Spectrum,
    apply_fractional_laplacian,
    apply_inverse_sqrt_laplacian,
    distance_grid,
    distance_to_boundary,
    eigenmode,
    evaluate_closed,
    from_spectral,
    gradient,
    gradient_closed,
    grid_norm_l2,
    riesz_velocity,
    spectral_norm_l2,
    sobolev_norm,
    to_spectral,
)

SQUARE = DomainSpec(np.pi, np.pi, 32, 32)


def random_field(domain, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    return GridField(domain, scale * rng.standard_normal((domain.N1, domain.N2)))


class TestTransforms:
    def test_eigenmode_is_single_coefficient(self):
        a = to_spectral(eigenmode(SQUARE, 1, 1))
        assert abs(a.coeffs[0, 0] - 1.0) <= 1e-12
        rest = a.coeffs.copy()
        rest[0, 0] = 0.0
        assert np.abs(rest).max() <= 1e-12

    def test_zero_spectrum_gives_zero_grid(self):
        a = SpectralField(SQUARE, np.zeros((32, 32)))
        assert from_spectral(a).max_abs() == 0.0

    def test_round_trip_random(self):
        g = random_field(SQUARE, seed=1)
        back = from_spectral(to_spectral(g))
        assert np.abs(back.values - g.values).max() <= 1e-12 * g.max_abs()

    def test_coefficient_matches_direct_quadrature(self):
        # independent oracle: a_{jk} = sum_i g(x_i) w_{jk}(x_i) dx dy
        g = random_field(SQUARE, seed=2)
        a = to_spectral(g)
        j, k = 5, 7
        w = eigenmode(SQUARE, j, k)
        quad = np.sum(g.values * w.values) * SQUARE.dx * SQUARE.dy
        assert abs(a.coeffs[j - 1, k - 1] - quad) <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            GridField(SQUARE, np.zeros((8, 8)))

    def test_evaluate_closed_has_zero_boundary(self):
        v = evaluate_closed(to_spectral(random_field(SQUARE, seed=3)))
        assert v.shape == (34, 34)
        assert np.abs(v[0, :]).max() == 0.0 and np.abs(v[:, -1]).max() == 0.0


class TestFunctionalCalculus:
    def test_sqrt_laplacian_on_ground_state(self):
        # lam_{11} = 2 on (0,pi)^2, so Lambda w_11 = sqrt(2) w_11
        a = to_spectral(eigenmode(SQUARE, 1, 1))
        out = from_spectral(apply_fractional_laplacian(a, 1.0))
        expected = np.sqrt(2.0) * eigenmode(SQUARE, 1, 1).values
        assert np.abs(out.values - expected).max() <= 1e-12 * np.sqrt(2.0)

    def test_s_zero_is_identity(self):
        a = to_spectral(random_field(SQUARE, seed=4))
        out = apply_fractional_laplacian(a, 0.0)
        assert np.abs(out.coeffs - a.coeffs).max() == 0.0

    def test_s_two_on_mode_21(self):
        # lam_{21} = 4 + 1 = 5 on (0,pi)^2
        a = to_spectral(eigenmode(SQUARE, 2, 1))
        out = from_spectral(apply_fractional_laplacian(a, 2.0))
        expected = 5.0 * eigenmode(SQUARE, 2, 1).values
        assert np.abs(out.values - expected).max() <= 5e-12

    def test_s_out_of_range(self):
        a = to_spectral(eigenmode(SQUARE, 1, 1))
        with pytest.raises(ValueError):
            apply_fractional_laplacian(a, 2.5)
        with pytest.raises(ValueError):
            apply_fractional_laplacian(a, -0.1)

    @pytest.mark.parametrize("s", [0.5, 1.0, 1.5, 2.0])
    def test_eigen_identity_all_modes(self, s):
        lam = Spectrum(SQUARE).eigenvalues
        for j, k in [(1, 1), (3, 2), (17, 29), (32, 32)]:
            a = to_spectral(eigenmode(SQUARE, j, k))
            out = from_spectral(apply_fractional_laplacian(a, s))
            lam_s = lam[j - 1, k - 1] ** (s / 2)
            err = np.abs(out.values - lam_s * eigenmode(SQUARE, j, k).values).max()
            assert err <= 1e-12 * lam_s

    def test_power_semigroup(self):
        a = to_spectral(random_field(SQUARE, seed=5))
        one = apply_fractional_laplacian(apply_fractional_laplacian(a, 0.7), 0.9)
        two = apply_fractional_laplacian(a, 1.6)
        scale = np.abs(two.coeffs).max()
        assert np.abs(one.coeffs - two.coeffs).max() <= 1e-11 * scale

    def test_inverse_on_ground_state(self):
        a = to_spectral(eigenmode(SQUARE, 1, 1))
        out = apply_inverse_sqrt_laplacian(a)
        assert abs(out.coeffs[0, 0] - 1.0 / np.sqrt(2.0)) <= 1e-14

    def test_inverse_composition(self):
        a = to_spectral(random_field(SQUARE, seed=6))
        back = apply_inverse_sqrt_laplacian(apply_fractional_laplacian(a, 1.0))
        assert np.abs(back.coeffs - a.coeffs).max() <= 1e-12 * np.abs(a.coeffs).max()

    def test_inverse_against_heat_time_quadrature(self):
        # Lambda^{-1} = c int_0^inf t^{-1/2} e^{t Delta} dt with
        # c = 1/Gamma(1/2); on w_11, e^{t Delta} w_11 = e^{-2t} w_11, so the
        # oracle is an adaptive quadrature of t^{-1/2} e^{-2t}.
        val, err = scipy.integrate.quad(lambda t: t ** -0.5 * np.exp(-2.0 * t), 0, np.inf)
        oracle = val / np.sqrt(np.pi)  # Gamma(1/2) = sqrt(pi)
        out = apply_inverse_sqrt_laplacian(to_spectral(eigenmode(SQUARE, 1, 1)))
        assert abs(out.coeffs[0, 0] - oracle) <= 1e-8


class TestGradient:
    def test_gradient_of_zero(self):
        a = SpectralField(SQUARE, np.zeros((32, 32)))
        gx, gy = gradient(a)
        assert gx.max_abs() == 0.0 and gy.max_abs() == 0.0

    def test_ground_state_center_is_critical_point(self):
        # use an odd mode count so the center is a collocation point
        dom = DomainSpec(np.pi, np.pi, 31, 31)
        gx, gy = gradient(to_spectral(eigenmode(dom, 1, 1)))
        i = dom.N1 // 2
        assert abs(gx.values[i, i]) <= 1e-13 and abs(gy.values[i, i]) <= 1e-13

    def test_matches_closed_form(self):
        # d/dx w_11 = (2/pi) cos(x) sin(y) on (0,pi)^2
        gx, gy = gradient(to_spectral(eigenmode(SQUARE, 1, 1)))
        X, Y = SQUARE.meshgrid()
        ex = (2.0 / np.pi) * np.cos(X) * np.sin(Y)
        ey = (2.0 / np.pi) * np.sin(X) * np.cos(Y)
        assert np.abs(gx.values - ex).max() <= 1e-10
        assert np.abs(gy.values - ey).max() <= 1e-10

    def test_mode_gradient_exact(self):
        j, k = 4, 9
        gx, _ = gradient(to_spectral(eigenmode(SQUARE, j, k)))
        X, Y = SQUARE.meshgrid()
        ex = (j * np.pi / SQUARE.L1) * (2 / np.pi) * np.cos(j * X) * np.sin(k * Y)
        assert np.abs(gx.values - ex).max() <= 1e-10 * np.abs(ex).max()


def torus_divergence(theta: SpectralField) -> float:
    """Odd/even extension of u to the periodic torus and exact FFT divergence."""
    d = theta.domain
    psi = apply_inverse_sqrt_laplacian(theta)
    px, py = gradient_closed(psi)
    u1, u2 = -py, px  # closed-grid values, shape (N1+2, N2+2)

    def extend(v, parity_x, parity_y):
        # closed grid rows 0..N+1 plus reflected rows give one full period 2(N+1)
        vx = np.concatenate([v, parity_x * v[-2:0:-1, :]], axis=0)
        return np.concatenate([vx, parity_y * vx[:, -2:0:-1]], axis=1)

    # u1 = -dpsi/dy: sine in x (odd), cosine in y (even); u2 mirrored
    e1 = extend(u1, -1, +1)
    e2 = extend(u2, +1, -1)
    m1, m2 = e1.shape
    k1 = 2j * np.pi * np.fft.fftfreq(m1, d=2 * d.L1 / m1)
    k2 = 2j * np.pi * np.fft.fftfreq(m2, d=2 * d.L2 / m2)
    div = np.fft.ifft2(k1[:, None] * np.fft.fft2(e1) + k2[None, :] * np.fft.fft2(e2))
    return float(np.abs(div).max())


class TestRieszVelocity:
    def test_single_mode_closed_form(self):
        u = riesz_velocity(to_spectral(eigenmode(SQUARE, 1, 1)))
        X, Y = SQUARE.meshgrid()
        pref = 2.0 / (np.pi * np.sqrt(2.0))
        assert np.abs(u.u1.values + pref * np.sin(X) * np.cos(Y)).max() <= 1e-12
        assert np.abs(u.u2.values - pref * np.cos(X) * np.sin(Y)).max() <= 1e-12

    def test_zero_theta(self):
        u = riesz_velocity(SpectralField(SQUARE, np.zeros((32, 32))))
        assert u.max_speed() == 0.0

    def test_divergence_free(self):
        theta = to_spectral(random_field(SQUARE, seed=7))
        u = riesz_velocity(theta)
        assert torus_divergence(theta) <= 1e-10 * u.max_speed()

    def test_normal_component_vanishes_on_walls(self):
        theta = to_spectral(random_field(SQUARE, seed=8))
        psi = apply_inverse_sqrt_laplacian(theta)
        px, py = gradient_closed(psi)
        u1, u2 = -py, px
        # normal components: u1 on x-walls, u2 on y-walls
        assert np.abs(u1[0, :]).max() <= 1e-13 and np.abs(u1[-1, :]).max() <= 1e-13
        assert np.abs(u2[:, 0]).max() <= 1e-13 and np.abs(u2[:, -1]).max() <= 1e-13


class TestGeometryAndNorms:
    def test_distance_center(self):
        assert distance_to_boundary((np.pi / 2, np.pi / 2), SQUARE) == pytest.approx(np.pi / 2)

    def test_distance_near_wall(self):
        assert distance_to_boundary((0.1, 1.0), SQUARE) == pytest.approx(0.1)

    def test_distance_boundary_point(self):
        assert distance_to_boundary((0.0, 2.0), SQUARE) == 0.0

    def test_distance_outside_raises(self):
        with pytest.raises(ValueError):
            distance_to_boundary((-0.1, 1.0), SQUARE)

    def test_distance_grid_matches_pointwise(self):
        dg = distance_grid(SQUARE)
        assert dg[0, 5] == pytest.approx(SQUARE.dx)
        assert dg[15, 15] == pytest.approx(min(SQUARE.x[15], np.pi - SQUARE.x[15]))

    def test_eigenfunctions_unit_norm_by_quadrature(self):
        for j, k in [(1, 1), (2, 5), (13, 31)]:
            n = grid_norm_l2(eigenmode(SQUARE, j, k))
            assert abs(n - 1.0) <= 1e-10

    def test_parseval(self):
        g = random_field(SQUARE, seed=9)
        a = to_spectral(g)
        assert grid_norm_l2(g) == pytest.approx(spectral_norm_l2(a), rel=1e-10)

    def test_dirichlet_isometry(self):
        # || grad f ||_2 = || Lambda f ||_2
        a = to_spectral(random_field(SQUARE, seed=10))
        gx, gy = gradient_closed(a)
        d = SQUARE
        # trapezoid over the closed grid; boundary rows vanish for gx*sin factor
        quad = np.sqrt((np.sum(gx ** 2) + np.sum(gy ** 2)) * d.dx * d.dy
                       - 0.5 * d.dx * d.dy * (np.sum(gx[0] ** 2) + np.sum(gx[-1] ** 2)
                                              + np.sum(gx[:, 0] ** 2) + np.sum(gx[:, -1] ** 2)
                                              + np.sum(gy[0] ** 2) + np.sum(gy[-1] ** 2)
                                              + np.sum(gy[:, 0] ** 2) + np.sum(gy[:, -1] ** 2)))
        assert quad == pytest.approx(sobolev_norm(a, 1.0), rel=1e-9)
