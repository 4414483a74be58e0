"""Bubble family, dimension constants, linearization kernel.

Expected values were computed with an independent radial Beta oracle:
int_0^inf r^{n-1} (1+r^2)^{-p} dr = (1/2) B(n/2, p - n/2), evaluated through
scipy.special.beta, before the package's own quadrature existed.
"""

import math

import numpy as np
import pytest
from scipy import special

import spikekit as sk
from spikekit import fd
from spikekit.bubble import (bubble_laplacian, context_quadrature_values,
                             dilation_eval, kernel_laplacian)
from spikekit.quadrature import QuadratureSpec, integrate_ball
from spikekit.rng import stream

from conftest import interior_points

PI3 = math.pi**3


def beta_oracle_constants(n):
    """A, B, S^{n/2} straight from the Beta integral, bypassing the package."""
    c = (n * (n - 2)) ** ((n - 2) / 4)
    omega = 2 * np.pi ** (n / 2) / math.gamma(n / 2)
    a = c ** ((n + 2) / (n - 2)) * omega * 0.5 * special.beta(n / 2, 1)
    b = c**2 * omega * 0.5 * special.beta(n / 2, (n - 4) / 2)
    s = c ** (2 * n / (n - 2)) * omega * 0.5 * special.beta(n / 2, n / 2)
    return a, b, s


class TestContext:
    def test_n6_values(self, ctx6):
        assert ctx6.c_n == 24.0
        assert ctx6.omega_n == pytest.approx(PI3, rel=1e-14)
        # A = B = 96 pi^3 at n = 6 (the two Beta moments coincide)
        assert ctx6.a_const == pytest.approx(96 * PI3, rel=1e-13)
        assert ctx6.b_const == pytest.approx(96 * PI3, rel=1e-13)
        assert ctx6.sobolev_level == pytest.approx(230.4 * PI3, rel=1e-13)

    @pytest.mark.parametrize("n", [5, 6, 7, 8])
    def test_matches_beta_oracle(self, n):
        ctx = sk.make_context(n)
        a, b, s = beta_oracle_constants(n)
        assert ctx.a_const == pytest.approx(a, rel=1e-12)
        assert ctx.b_const == pytest.approx(b, rel=1e-12)
        assert ctx.sobolev_level == pytest.approx(s, rel=1e-12)

    @pytest.mark.parametrize("n", [5, 6, 7, 8])
    def test_quadrature_cross_check(self, n):
        ctx = sk.make_context(n, cross_check=False)
        quad = context_quadrature_values(ctx)
        for name in ("a_const", "b_const", "sobolev_level"):
            assert quad[name] == pytest.approx(getattr(ctx, name), rel=1e-10)

    def test_low_dimension_rejected(self):
        with pytest.raises(ValueError, match="diverges"):
            sk.make_context(4)

    def test_omega_via_monte_carlo_volume(self):
        # cross-check omega_6 = pi^3 by estimating the unit-ball volume
        # from uniform cube samples: vol = omega/n
        rng = stream(123, "omega-mc")
        pts = rng.random((400_000, 6)) * 2.0 - 1.0
        inside = np.sum(pts * pts, axis=1) <= 1.0
        frac = inside.mean()
        vol = frac * 2.0**6
        sigma = 2.0**6 * math.sqrt(frac * (1 - frac) / len(pts))
        assert abs(6.0 * vol - PI3) < 4 * 6.0 * sigma

    def test_a_equals_b_only_at_six(self):
        ctx7 = sk.make_context(7)
        assert ctx7.a_const != pytest.approx(ctx7.b_const, rel=1e-3)


class TestBubbleEval:
    def test_point_values(self, ctx6):
        p = sk.BubbleParams(np.zeros(6), 1.0)
        assert sk.bubble_eval(ctx6, p, np.zeros(6)) == 24.0
        e1 = np.zeros(6)
        e1[0] = 1.0
        assert sk.bubble_eval(ctx6, p, e1) == pytest.approx(6.0, rel=1e-15)
        tall = sk.BubbleParams(np.zeros(6), 2.0)
        assert sk.bubble_eval(ctx6, tall, np.zeros(6)) == pytest.approx(96.0, rel=1e-15)

    def test_positive_and_radially_decreasing(self, ctx6):
        p = sk.BubbleParams(np.ones(6) * 0.1, 3.0)
        radii = np.linspace(0, 2, 40)
        direction = np.ones(6) / math.sqrt(6.0)
        vals = np.array([sk.bubble_eval(ctx6, p, p.center + r * direction) for r in radii])
        assert np.all(vals > 0)
        assert np.all(np.diff(vals) < 0)

    def test_scaling_covariance_exact(self, ctx6):
        # U_{x, t mu}(y) = t^{(n-2)/2} U_{0, mu}(t (y - x)), an exact identity
        rng = stream(5, "scaling")
        for _ in range(25):
            x = rng.standard_normal(6)
            y = rng.standard_normal(6)
            mu = float(np.exp(rng.uniform(-1, 1)))
            t = float(np.exp(rng.uniform(-1, 1)))
            lhs = sk.bubble_eval(ctx6, sk.BubbleParams(x, t * mu), y)
            rhs = t**2 * sk.bubble_eval(ctx6, sk.BubbleParams(np.zeros(6), mu), t * (y - x))
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_height_must_be_positive(self):
        with pytest.raises(ValueError):
            sk.BubbleParams(np.zeros(6), -1.0)

    @pytest.mark.parametrize("n", [5, 6, 7, 8])
    def test_pde_pointwise_fd(self, n):
        ctx = sk.make_context(n, cross_check=False)
        p = sk.BubbleParams(np.zeros(n), 1.0)
        rng = stream(n, "pde")
        pts = rng.standard_normal((100, n)) * 0.7
        lap_fd = fd.laplacian(lambda y: sk.bubble_eval(ctx, p, y), pts)
        lap = bubble_laplacian(ctx, p, pts)
        # central second differences at h = 1e-3 are O(h^2) accurate
        assert np.max(np.abs(lap_fd - lap) / np.abs(lap)) < 1e-4
        # -Delta U = U^{(n+2)/(n-2)} in closed form
        rhs = sk.bubble_eval(ctx, p, pts) ** ((n + 2.0) / (n - 2.0))
        assert np.max(np.abs(-lap - rhs) / rhs) < 1e-13


class TestKernelFunctions:
    def test_point_values(self, ctx6):
        assert sk.kernel_function(ctx6, 0, np.zeros(6)) == pytest.approx(48.0, rel=1e-15)
        assert sk.kernel_function(ctx6, 1, np.zeros(6)) == 0.0
        e1 = np.zeros(6)
        e1[0] = 1.0
        assert sk.kernel_function(ctx6, 1, e1) == pytest.approx(-12.0, rel=1e-14)

    def test_index_out_of_range(self, ctx6):
        with pytest.raises(IndexError):
            sk.kernel_function(ctx6, 7, np.zeros(6))

    def test_spatial_elements_match_fd(self, ctx6):
        # psi_i (i >= 1) is the i-th spatial derivative of the unit bubble
        p = sk.BubbleParams(np.zeros(6), 1.0)
        rng = stream(2, "kernel-fd")
        pts = rng.standard_normal((30, 6)) * 0.6
        grads = fd.gradient(lambda y: sk.bubble_eval(ctx6, p, y), pts)
        for i in range(1, 7):
            vals = sk.kernel_function(ctx6, i, pts)
            assert np.max(np.abs(vals - grads[:, i - 1])) < 1e-6 * np.max(np.abs(vals) + 1)

    def test_height_element_matches_fd(self, ctx6):
        rng = stream(3, "kernel-mu")
        pts = rng.standard_normal((30, 6)) * 0.6
        h = 1e-6
        up = sk.bubble_eval(ctx6, sk.BubbleParams(np.zeros(6), 1 + h), pts)
        dn = sk.bubble_eval(ctx6, sk.BubbleParams(np.zeros(6), 1 - h), pts)
        fd_mu = (up - dn) / (2 * h)
        vals = sk.kernel_function(ctx6, 0, pts)
        assert np.max(np.abs(vals - fd_mu)) < 1e-5

    def test_dilation_combination_equals_height_element(self, ctx6):
        # y . grad U + ((n-2)/2) U reproduces the height derivative
        rng = stream(4, "dilation")
        pts = rng.standard_normal((50, 6)) * 0.8
        assert np.allclose(dilation_eval(ctx6, pts), sk.kernel_function(ctx6, 0, pts),
                           rtol=1e-12, atol=1e-13)


class TestLinearizedOperator:
    def test_kernel_membership_analytic(self, ctx6):
        rng = stream(6, "lin")
        pts = rng.standard_normal((200, 6)) * 0.9
        for i in range(7):
            vals = sk.linearized_apply(ctx6, sk.kernel_field(ctx6, i), pts)
            assert np.max(np.abs(vals)) < 1e-6
        vals = sk.linearized_apply(ctx6, sk.dilation_field(ctx6), pts)
        assert np.max(np.abs(vals)) < 1e-6

    def test_kernel_membership_fd_path(self, ctx6):
        # plain callables go through the finite-difference Laplacian
        rng = stream(7, "lin-fd")
        pts = rng.standard_normal((20, 6)) * 0.5
        vals = sk.linearized_apply(ctx6, lambda y: sk.kernel_function(ctx6, 3, y), pts)
        assert np.max(np.abs(vals)) < 1e-3

    def test_bubble_itself(self, ctx6):
        # L(U) = (1 - (n+2)/(n-2)) U^{(n+2)/(n-2)}; at the origin for n=6: -576
        p = sk.BubbleParams(np.zeros(6), 1.0)
        val = sk.linearized_apply(ctx6, sk.bubble_field(ctx6, p), np.zeros(6)[None])
        assert val[0] == pytest.approx(-576.0, rel=1e-12)

    @pytest.mark.parametrize("n", [5, 7])
    def test_bubble_other_dimensions(self, n):
        ctx = sk.make_context(n, cross_check=False)
        p = sk.BubbleParams(np.zeros(n), 1.0)
        val = sk.linearized_apply(ctx, sk.bubble_field(ctx, p), np.zeros(n)[None])
        expected = (1 - (n + 2) / (n - 2)) * ctx.c_n ** ((n + 2) / (n - 2))
        assert val[0] == pytest.approx(expected, rel=1e-12)

    def test_kernel_laplacians_match_fd(self, ctx6):
        rng = stream(8, "lap-fd")
        pts = rng.standard_normal((20, 6)) * 0.7
        for i in (0, 2):
            lap = kernel_laplacian(ctx6, i, pts)
            lap_fd = fd.laplacian(lambda y: sk.kernel_function(ctx6, i, y), pts)
            assert np.max(np.abs(lap - lap_fd)) < 1e-3


class TestKernelMoment:
    def test_equals_minus_b_n6(self, ctx6):
        val = sk.pohozaev_kernel_moment(ctx6)
        assert val == pytest.approx(-96 * PI3, rel=1e-8)

    def test_equals_minus_b_n7(self):
        ctx = sk.make_context(7, cross_check=False)
        _, b7, _ = beta_oracle_constants(7)
        assert sk.pohozaev_kernel_moment(ctx) == pytest.approx(-b7, rel=1e-8)

    def test_odd_moments_vanish(self, ctx6):
        # int U^{(n+2)/(n-2)} psi_i = 0 for i >= 1 by odd symmetry
        p = sk.BubbleParams(np.zeros(6), 1.0)
        spec = QuadratureSpec(seed=31, samples=100_000)

        def integrand(y):
            return sk.bubble_eval(ctx6, p, y) ** 2 * sk.kernel_function(ctx6, 1, y)

        res = integrate_ball(integrand, np.zeros(6), 3.0, spec)
        assert abs(res.value) <= 3 * res.stderr


class TestProjectedBubble:
    def test_center_value(self, ctx6, ball6):
        p = sk.BubbleParams(np.zeros(6), 100.0)
        val = sk.projected_bubble_eval(ctx6, ball6, p, np.zeros(6))
        expected = 24.0 * 100.0**2 - 96 * PI3 * 100.0**-2 / (4 * PI3)
        assert val == pytest.approx(expected, rel=1e-14)

    def test_boundary_residual_order(self, ctx6, ball6):
        # on the boundary the leading-order projection leaves only the
        # O(mu^{-(n+2)/2}) tail; doubling mu shrinks it by 2^{-4} at n = 6
        e1 = np.zeros(6)
        e1[0] = 1.0
        vals = {}
        for mu in (50.0, 100.0):
            vals[mu] = sk.projected_bubble_eval(ctx6, ball6, sk.BubbleParams(np.zeros(6), mu), e1)
        ratio = vals[100.0] / vals[50.0]
        assert ratio == pytest.approx(2.0 ** (-4.0), rel=0.05)
        assert abs(vals[100.0]) < 50.0 * 100.0 ** (-4.0)

    def test_far_field_coefficient(self, ctx6):
        # fit the |y-x|^{2-n} coefficient of the bubble and match it to
        # A / ((n-2) omega_n) = c_n
        d = 0.5
        e1 = np.zeros(6)
        e1[0] = d
        coefs = []
        for mu in (1e3, 1e4, 1e5):
            u = sk.bubble_eval(ctx6, sk.BubbleParams(np.zeros(6), mu), e1)
            coefs.append(u * d**4 * mu**2)
        assert coefs[-1] == pytest.approx(ctx6.a_const / (4 * ctx6.omega_n), rel=1e-6)
        assert coefs[-1] == pytest.approx(ctx6.c_n, rel=1e-6)
        assert abs(coefs[2] - ctx6.c_n) < abs(coefs[0] - ctx6.c_n)

    def test_green_function_limit(self, ctx6, ball6):
        # at fixed y != x the projected bubble behaves like
        # A mu^{-(n-2)/2} G(x, y); the log-log slope in mu is -(n-2)/2
        x = np.zeros(6)
        x[0] = 0.2
        y = np.zeros(6)
        y[1] = 0.5
        g = ball6.green(x, y)
        ratios = []
        for mu in (1e3, 1e6):
            val = sk.projected_bubble_eval(ctx6, ball6, sk.BubbleParams(x, mu), y)
            ratios.append(val / (ctx6.a_const * mu**-2.0))
        assert ratios[1] == pytest.approx(g, rel=1e-5)
        assert abs(ratios[1] - g) < abs(ratios[0] - g)
        v1 = sk.projected_bubble_eval(ctx6, ball6, sk.BubbleParams(x, 1e3), y)
        v2 = sk.projected_bubble_eval(ctx6, ball6, sk.BubbleParams(x, 2e3), y)
        slope = math.log(v2 / v1) / math.log(2.0)
        assert slope == pytest.approx(-2.0, abs=5e-3)

    def test_center_outside_domain_rejected(self, ctx6, ball6):
        p = sk.BubbleParams(np.full(6, 0.9), 100.0)
        with pytest.raises(ValueError):
            sk.projected_bubble_eval(ctx6, ball6, p, np.zeros(6))

    def test_perturbative_regime_warning(self, ctx6, ball6):
        p = sk.BubbleParams(np.zeros(6), 5.0)
        with pytest.warns(UserWarning, match="perturbative"):
            sk.projected_bubble_eval(ctx6, ball6, p, np.zeros(6))

    def test_field_gradient_matches_fd(self, ctx6, ball6):
        p = sk.BubbleParams(np.zeros(6), 50.0)
        f = sk.projected_bubble_field(ctx6, ball6, p)
        rng = stream(9, "pu-grad")
        pts = interior_points(rng, 10, scale=0.5)
        g = f.gradient(pts)
        gfd = fd.gradient(f.value, pts)
        assert np.max(np.abs(g - gfd)) < 1e-4 * np.max(np.abs(g))
