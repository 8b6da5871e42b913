"""Tests for the heat-kernel lab: semigroup, kernels, survival bounds, intpk."""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special

from sqgbounds.heatkernel import (
    ThetaProfile,
    fractional_laplacian_of_one,
    fractional_laplacian_of_one_spectral,
    heat_evolve,
    heat_increment,
    intpk_quadrature,
    interval_kernel_images,
    interval_kernel_matrix,
    kernel_point,
    modes_needed,
    one_minus_survival_1d,
    survival_1d,
    survival_probability,
    time_normalization,
    verify_cancellation_bounds,
    verify_gradient_bounds,
    verify_kernel_gaussian_bounds,
    verify_theta_bounds,
)
from sqgbounds.spectral import (
    DomainSpec,
    GridField,
    Spectrum,
    eigenmode,
    spectral_norm_l2,
    to_spectral,
)

SQUARE = DomainSpec(np.pi, np.pi, 32, 32)


def random_spectral(domain, seed=0):
    rng = np.random.default_rng(seed)
    return to_spectral(GridField(domain, rng.standard_normal((domain.N1, domain.N2))))


class TestHeatEvolve:
    def test_t_zero_identity(self):
        a = random_spectral(SQUARE, 1)
        out = heat_evolve(a, 0.0)
        assert np.abs(out.coeffs - a.coeffs).max() == 0.0

    def test_ground_state_decay(self):
        a = to_spectral(eigenmode(SQUARE, 1, 1))
        out = heat_evolve(a, 1.0)
        assert out.coeffs[0, 0] == pytest.approx(math.exp(-2.0), rel=1e-14)

    def test_l2_contraction(self):
        a = random_spectral(SQUARE, 2)
        lam1 = Spectrum(SQUARE).lambda_min
        for t in (0.01, 0.1, 1.0):
            assert spectral_norm_l2(heat_evolve(a, t)) <= math.exp(-lam1 * t) * spectral_norm_l2(a) + 1e-14

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            heat_evolve(random_spectral(SQUARE), -0.1)

    def test_semigroup_property(self):
        a = random_spectral(SQUARE, 3)
        one = heat_evolve(heat_evolve(a, 0.3), 0.45)
        two = heat_evolve(a, 0.75)
        assert np.abs(one.coeffs - two.coeffs).max() <= 1e-12

    def test_increment_matches_evolve(self):
        a = random_spectral(SQUARE, 4)
        inc = heat_increment(a, 0.2)
        ref = heat_evolve(a, 0.2).coeffs - a.coeffs
        assert np.abs(inc.coeffs - ref).max() <= 1e-14


class TestIntervalKernel:
    def test_series_vs_images_spot(self):
        s = interval_kernel_matrix([1.0], [1.5], 0.1, np.pi)[0, 0]
        i = interval_kernel_images([1.0], [1.5], 0.1, np.pi)[0, 0]
        assert abs(s - i) <= 1e-10 * abs(i)

    @pytest.mark.parametrize("t", [1e-3, 1e-2, 0.1, 1.0])
    def test_series_vs_images_grid(self, t):
        xs = np.linspace(0.2, np.pi - 0.2, 9)
        s = interval_kernel_matrix(xs, xs, t, np.pi)
        i = interval_kernel_images(xs, xs, t, np.pi)
        scale = np.abs(i).max()
        assert np.abs(s - i).max() <= 1e-10 * scale

    def test_symmetry(self):
        rng = np.random.default_rng(5)
        xs = rng.uniform(0.1, np.pi - 0.1, 6)
        k = interval_kernel_matrix(xs, xs, 0.2, np.pi)
        assert np.abs(k - k.T).max() <= 1e-12 * np.abs(k).max()

    def test_dirichlet_boundary(self):
        k = interval_kernel_matrix([1.0], [0.0, np.pi], 0.3, np.pi)
        assert np.abs(k).max() <= 1e-13

    def test_derivative_matches_images(self):
        xs = np.linspace(0.3, np.pi - 0.3, 7)
        for dx, dy in [(1, 0), (0, 1), (2, 0), (1, 1)]:
            s = interval_kernel_matrix(xs, xs, 0.05, np.pi, deriv_x=dx, deriv_y=dy)
            i = interval_kernel_images(xs, xs, 0.05, np.pi, deriv_x=dx, deriv_y=dy)
            assert np.abs(s - i).max() <= 1e-9 * np.abs(i).max()

    def test_kernel_point_positive_and_symmetric(self):
        x, y = (1.0, 2.0), (1.7, 0.9)
        a = kernel_point(x, y, 0.2, SQUARE)
        b = kernel_point(y, x, 0.2, SQUARE)
        assert a > 0
        assert abs(a - b) <= 1e-12 * abs(a)

    def test_kernel_point_vs_joint_eigen_sum(self):
        # oracle: single sum over 2D eigenpairs, no 1D factorization
        x, y, t = (1.0, 2.0), (1.7, 0.9), 0.4
        j = np.arange(1, 65)
        lam = j[:, None] ** 2 + j[None, :] ** 2
        wx = np.outer(np.sin(j * x[0]), np.sin(j * x[1]))
        wy = np.outer(np.sin(j * y[0]), np.sin(j * y[1]))
        direct = (4 / np.pi ** 2) * np.sum(np.exp(-t * lam) * wx * wy)
        assert kernel_point(x, y, t, SQUARE) == pytest.approx(direct, rel=1e-12)

    def test_refusal_reports_required_modes(self):
        with pytest.raises(ValueError, match="modes"):
            kernel_point((1.0, 1.0), (1.2, 1.2), 1e-7, SQUARE, mode_budget=256)

    def test_mass_integrates_to_theta(self):
        # int_Omega H(x, y, t) dy = Theta(x, t) <= 1
        x, t = (1.1, 2.0), 0.07
        nodes, w = np.polynomial.legendre.leggauss(200)
        y1 = 0.5 * np.pi * (nodes + 1.0)
        w = 0.5 * np.pi * w
        m1 = interval_kernel_matrix([x[0]], y1, t, np.pi)[0] @ w
        m2 = interval_kernel_matrix([x[1]], y1, t, np.pi)[0] @ w
        mass = m1 * m2
        theta = survival_probability(x, t, SQUARE)
        assert mass <= 1.0 + 1e-10
        assert abs(mass - theta) <= 1e-8


class TestSurvival:
    def test_range_over_sweep(self):
        xs = np.linspace(0.05, np.pi - 0.05, 21)
        for t in (1e-4, 1e-2, 0.5, 5.0):
            th = survival_1d(xs, t, np.pi)
            assert np.all(th >= -1e-12) and np.all(th <= 1.0 + 1e-10)

    def test_long_time_below_leading_mode(self):
        # leading-eigenmode oracle: Theta <= e^{-lam_1 t} * ||1||_2 * sup w_1
        val = survival_probability((1.0, 1.5), 20.0, SQUARE)
        assert val <= 1e-6

    def test_short_time_interior_is_one(self):
        assert survival_probability((np.pi / 2, np.pi / 2), 1e-4, SQUARE) >= 0.999

    def test_series_and_images_agree_at_switch(self):
        xs = np.linspace(0.1, np.pi - 0.1, 15)
        for t in (0.049999, 0.050001, 0.02, 0.2):
            r = 0.5 / math.sqrt(t)
            erfc = scipy.special.erfc
            # reference: CDF differences of the image sum, no erfc regrouping
            L = np.pi
            ref = np.ones_like(xs)
            for m in range(-8, 9):
                ref -= (scipy.special.erf((xs - 2 * L * m) * r)
                        - 0.5 * scipy.special.erf((xs - L - 2 * L * m) * r)
                        - 0.5 * scipy.special.erf((xs + L - 2 * L * m) * r))
            got = one_minus_survival_1d(xs, t, np.pi)
            assert np.abs(got - ref).max() <= 1e-12

    def test_profile_invariants(self):
        prof = ThetaProfile(points=[(0.5, 0.5), (1.5, 2.0)],
                            times=[1e-3, 1e-2, 0.1, 1.0]).tabulate(SQUARE)
        prof.check_invariants()

    def test_profile_rejects_bad_times(self):
        with pytest.raises(ValueError):
            ThetaProfile(points=[(1, 1)], times=[0.0, 1.0])


class TestThetaBounds:
    def test_reports_pass(self):
        low, up = verify_theta_bounds(SQUARE)
        assert low.passed and up.passed
        assert low.fitted_constant > 0
        assert np.isfinite(up.fitted_constant)

    def test_upper_trivial_far_from_boundary(self):
        # d/sqrt t >= 10 makes Theta <= 1 <= C d/sqrt t already for C = 0.1
        th = survival_probability((np.pi / 2, np.pi / 2), 1e-4, SQUARE)
        assert abs(th - 1.0) <= 1e-6


class TestLambdaOne:
    def test_normalization_closed_form(self):
        # int (1-e^-u) u^{-3/2} du = 2 sqrt(pi)
        assert time_normalization(1.0) == pytest.approx(1.0 / (2 * math.sqrt(math.pi)), rel=1e-10)

    def test_spectral_cross_check_at_center(self):
        quad = fractional_laplacian_of_one((np.pi / 2, np.pi / 2), 1.0, SQUARE)
        spec = fractional_laplacian_of_one_spectral((np.pi / 2, np.pi / 2), 1.0, SQUARE)
        assert quad > 0
        assert abs(quad - spec) <= 1e-6 * abs(quad)

    def test_monotone_in_distance(self):
        near = fractional_laplacian_of_one((0.2, np.pi / 2), 1.0, SQUARE)
        far = fractional_laplacian_of_one((1.0, np.pi / 2), 1.0, SQUARE)
        assert near > far > 0

    def test_lower_bound_c_over_d(self):
        # (Lambda^s 1)(x) >= c d(x)^{-s} with a positive fitted c
        pts = [(0.15, 1.5), (0.4, 1.0), (1.0, 1.2), (np.pi / 2, np.pi / 2)]
        for s in (0.5, 1.0, 1.5):
            cs = []
            for p in pts:
                d = min(p[0], np.pi - p[0], p[1], np.pi - p[1])
                cs.append(fractional_laplacian_of_one(p, s, SQUARE) * d ** s)
            assert min(cs) > 0


class TestKernelBoundReports:
    def test_far_field_matches_free_gaussian(self):
        t = 0.01
        pts = [(np.pi / 2, np.pi / 2), (np.pi / 2 + 0.15, np.pi / 2 - 0.1)]
        free = math.exp(-(0.15 ** 2 + 0.1 ** 2) / (4 * t)) / (4 * math.pi * t)
        ratio = kernel_point(pts[0], pts[1], t, SQUARE) / free
        assert 0.9 <= ratio <= 1.1

    def test_gaussian_bound_report(self):
        rep = verify_kernel_gaussian_bounds(SQUARE)
        assert rep.passed
        assert rep.extras["lower_c"] > 0
        assert np.isfinite(rep.fitted_constant)

    def test_gradient_ratio_zero_at_symmetric_point(self):
        # x = y far from the boundary: grad_x H vanishes by image symmetry
        x = (np.pi / 2, np.pi / 2)
        t = 0.01
        h = kernel_point(x, x, t, SQUARE)
        d1 = interval_kernel_matrix([x[0]], [x[0]], t, np.pi, deriv_x=1)[0, 0]
        h1 = interval_kernel_matrix([x[0]], [x[0]], t, np.pi)[0, 0]
        grad = math.hypot(d1 * h1, h1 * d1)
        assert grad <= 1e-8 * h

    def test_gradient_bound_report(self):
        rep = verify_gradient_bounds(SQUARE)
        assert rep.passed
        assert np.isfinite(rep.extras["near_boundary_C"])
        assert np.isfinite(rep.extras["short_time_C"])

    def test_translation_invariant_part_depends_on_sum(self):
        # (d/dx + d/dy) of the 1D kernel is a function of x + y only; pick a
        # pair with x + y close to the wall so the image term is order one
        t, L = 0.05, np.pi
        a = interval_kernel_matrix([0.3], [0.5], t, L, deriv_x=1)[0, 0] + \
            interval_kernel_matrix([0.3], [0.5], t, L, deriv_y=1)[0, 0]
        b = interval_kernel_matrix([0.2], [0.6], t, L, deriv_x=1)[0, 0] + \
            interval_kernel_matrix([0.2], [0.6], t, L, deriv_y=1)[0, 0]
        assert abs(a) > 0.1
        assert abs(a - b) <= 1e-12 * abs(a)

    def test_cancellation_reports(self):
        hess, c1, c2 = verify_cancellation_bounds(SQUARE, nquad=128)
        for rep in (hess, c1, c2):
            assert rep.passed
            assert rep.fitted_constant > 0
            assert rep.extras["K_tilde"] >= 4.0


class TestIntpk:
    def test_exact_gamma_case(self):
        # m=2, j=0, K=1, p=1, rho=inf: substitute u = p^2/t, equals Gamma(1) = 1
        assert intpk_quadrature(np.inf, 1.0, 2, 0, 1.0) == pytest.approx(1.0, rel=1e-9)

    @pytest.mark.parametrize("m,j,K,p,rho", [
        (2, 0, 1.0, 1.0, np.inf),
        (3, 1, 2.0, 0.7, np.inf),
        (1, 0, 4.0, 1.3, 2.0),
        (0, 2, 1.5, 0.5, 1.0),
    ])
    def test_against_incomplete_gamma_oracle(self, m, j, K, p, rho):
        # u = p^2/(K t) turns the integral into K^{(m+j)/2} p^{-m} Gamma_upper((m+j)/2, p^2/(K rho^2))
        a = (m + j) / 2.0
        lo = 0.0 if not np.isfinite(rho) else p * p / (K * rho * rho)
        oracle = K ** a * p ** (-m) * scipy.special.gammaincc(a, lo) * scipy.special.gamma(a) \
            if lo > 0 else K ** a * p ** (-m) * scipy.special.gamma(a)
        assert intpk_quadrature(rho, p, m, j, K) == pytest.approx(oracle, rel=1e-8)

    def test_uniform_in_rho_and_p(self):
        # C with value <= C p^{-m} independent of rho, p over a sweep
        m, j, K = 2, 1, 2.0
        vals = []
        for p in (0.25, 0.5, 1.0, 2.0):
            for rho in (0.5, 1.0, 4.0, np.inf):
                vals.append(intpk_quadrature(rho, p, m, j, K) * p ** m)
        assert max(vals) < np.inf
        assert max(vals) <= K ** ((m + j) / 2) * scipy.special.gamma((m + j) / 2) * (1 + 1e-9)

    def test_log_case_growth(self):
        K, p = 1.0, 0.1
        base = intpk_quadrature(1.0, p, 0, 0, K)
        big = intpk_quadrature(100.0, p, 0, 0, K)
        # grows like 2 log(sqrt(K) rho / p) for rho >> p
        assert big - base == pytest.approx(2 * math.log(100.0), abs=0.1)

    def test_large_p_vanishes(self):
        assert intpk_quadrature(1.0, 50.0, 2, 0, 1.0) <= 1e-300 * 1e280 + 0.0 or \
            intpk_quadrature(1.0, 50.0, 2, 0, 1.0) < 1e-200

    def test_log_case_needs_finite_rho(self):
        with pytest.raises(ValueError):
            intpk_quadrature(np.inf, 1.0, 0, 0, 1.0)


def test_modes_needed_monotone():
    assert modes_needed(1e-4, np.pi) > modes_needed(1e-2, np.pi) > modes_needed(1.0, np.pi)
