"""Ball Green's function kernel: defining properties and derivative stack."""

import math

import numpy as np
import pytest

import spikekit as sk
from spikekit import fd
from spikekit.greens import DomainError
from spikekit.rng import stream

from conftest import interior_points

PI3 = math.pi**3


class TestDefiningProperties:
    def test_robin_at_center(self, ball6):
        # harmonic-matching oracle: H(0,.) must equal the singular part on
        # the boundary sphere, and it is constant, so R(0) = S at radius 1
        assert ball6.robin(np.zeros(6)) == pytest.approx(1 / (4 * PI3), rel=1e-14)

    def test_regular_part_matches_singular_on_boundary(self, ball6):
        rng = stream(11, "match")
        for x in interior_points(rng, 20):
            b = rng.standard_normal(6)
            b /= np.linalg.norm(b)
            h = ball6.regular(x, b)
            s = ball6.singular(x, b)
            assert h == pytest.approx(s, rel=1e-12)

    def test_boundary_vanishing(self, ball6):
        rng = stream(12, "bdry")
        worst = 0.0
        for x in interior_points(rng, 100):
            b = rng.standard_normal(6)
            b /= np.linalg.norm(b)
            worst = max(worst, abs(ball6.green(x, b)))
        assert worst <= 1e-12

    def test_symmetry(self, ball6):
        rng = stream(13, "sym")
        pts = interior_points(rng, 200)
        worst = 0.0
        for x, y in zip(pts[:100], pts[100:]):
            if np.linalg.norm(x - y) < 1e-3:
                continue
            worst = max(worst, abs(ball6.green(x, y) - ball6.green(y, x)))
        assert worst <= 1e-12

    def test_regular_part_harmonic(self, ball6):
        rng = stream(14, "harm")
        for _ in range(10):
            x = interior_points(rng, 1, scale=0.6)[0]
            y = interior_points(rng, 1, scale=0.6)[0]
            lap = fd.laplacian(lambda yy: ball6.regular(x, yy), y)
            assert abs(lap) < 1e-5 * max(1.0, abs(ball6.regular(x, y)))

    def test_robin_blows_up_and_is_monotone_on_rays(self, ball6):
        radii = np.linspace(0.0, 0.95, 30)
        direction = np.ones(6) / math.sqrt(6)
        vals = np.array([ball6.robin(r * direction) for r in radii])
        assert np.all(np.diff(vals) > 0)
        assert vals[-1] > 100 * vals[0]

    def test_positivity_inside(self, ball6):
        rng = stream(15, "pos")
        pts = interior_points(rng, 100)
        for x, y in zip(pts[:50], pts[50:]):
            if np.linalg.norm(x - y) < 1e-2:
                continue
            assert ball6.green(x, y) > 0


class TestErrors:
    def test_outside_rejected(self, ball6):
        with pytest.raises(DomainError):
            ball6.green(np.full(6, 0.9), np.zeros(6))
        with pytest.raises(DomainError):
            ball6.regular(np.zeros(6), np.full(6, 1.2))

    def test_near_diagonal_refused(self, ball6):
        x = np.zeros(6)
        y = np.zeros(6) + 1e-12
        with pytest.raises(DomainError):
            ball6.green(x, y)

    def test_conditioning_guard_near_boundary(self, ball6):
        x = np.zeros(6)
        x[0] = 1.0 - 1e-9
        with pytest.raises(DomainError):
            ball6.robin_grad(x)

    def test_bad_radius(self, ctx6):
        with pytest.raises(ValueError):
            sk.ball_kernel(ctx6, np.zeros(6), -1.0)


class TestDerivativeStack:
    def test_robin_gradient_center(self, ball6):
        assert np.linalg.norm(ball6.robin_grad(np.zeros(6))) == 0.0

    def test_robin_hessian_center(self, ball6):
        # second-order Taylor of (1-|x|^2)^{-(n-2)}: Hess R(0) = 2(n-2) kappa I
        hess = ball6.robin_hess(np.zeros(6))
        assert np.allclose(hess, (8 / (4 * PI3)) * np.eye(6), rtol=1e-13, atol=1e-16)

    def test_robin_derivatives_match_fd(self, ball6):
        rng = stream(16, "robin-fd")
        worst_g = worst_h = 0.0
        for x in interior_points(rng, 50, scale=0.7):
            g = ball6.robin_grad(x)
            gfd = fd.gradient(lambda xs: np.array([ball6.robin(p) for p in np.atleast_2d(xs)]), x)
            worst_g = max(worst_g, np.linalg.norm(g - gfd) / np.linalg.norm(g))
            h = ball6.robin_hess(x)
            hfd = fd.hessian(ball6.robin, x)
            worst_h = max(worst_h, np.linalg.norm(h - hfd) / np.linalg.norm(h))
        assert worst_g < 1e-6
        assert worst_h < 1e-4  # second differences carry the larger step

    def test_green_gradients_match_fd(self, ball6):
        rng = stream(17, "green-fd")
        x = np.array([0.25, -0.1, 0.05, 0.0, 0.2, 0.0])
        y = np.array([-0.3, 0.2, 0.0, 0.15, 0.0, -0.1])
        g1 = ball6.green_grad1(x, y)
        g1fd = fd.gradient(lambda xs: np.array([ball6.green(p, y) for p in np.atleast_2d(xs)]), x)
        assert np.linalg.norm(g1 - g1fd) / np.linalg.norm(g1) < 1e-8
        g2 = ball6.green_grad2(x, y)
        g2fd = fd.gradient(lambda yy: ball6.green(x, yy), y)
        assert np.linalg.norm(g2 - g2fd) / np.linalg.norm(g2) < 1e-8
        pts = interior_points(rng, 5, scale=0.6)
        gh = ball6.regular_grad2(x, pts)
        ghfd = fd.gradient(lambda yy: ball6.regular(x, yy), pts)
        assert np.max(np.abs(gh - ghfd)) < 1e-8

    def test_green_hessians_match_fd(self, ball6):
        x = np.array([0.25, -0.1, 0.05, 0.0, 0.2, 0.0])
        y = np.array([-0.3, 0.2, 0.0, 0.15, 0.0, -0.1])
        h11 = ball6.green_hess11(x, y)
        h11fd = fd.hessian(lambda xs: ball6.green(xs, y), x)
        assert np.linalg.norm(h11 - h11fd) / np.linalg.norm(h11) < 1e-4
        h12 = ball6.green_hess12(x, y)
        h12fd = np.empty((6, 6))
        for a in range(6):
            e = np.zeros(6)
            e[a] = 1e-5
            h12fd[a] = (ball6.green_grad2(x + e, y) - ball6.green_grad2(x - e, y)) / 2e-5
        assert np.linalg.norm(h12 - h12fd) / np.linalg.norm(h12) < 1e-8

    def test_derivative_field_rows(self, ball6):
        x = np.array([0.2, 0.1, 0.0, 0.0, -0.15, 0.0])
        y = np.array([-0.25, 0.3, 0.1, 0.0, 0.0, 0.2])
        h12 = ball6.green_hess12(x, y)
        for h in (0, 3):
            row = ball6.green_d1_grad2(x, y[None, :], h)[0]
            assert np.allclose(row, h12[h], rtol=1e-12, atol=1e-15)
            assert ball6.green_d1(x, y[None, :], h)[0] == pytest.approx(
                ball6.green_grad1(x, y)[h], rel=1e-14)

    def test_second_slot_derivative_field(self, ball6):
        x = np.array([0.2, 0.1, 0.0, 0.0, -0.15, 0.0])
        rng = stream(18, "d2")
        pts = interior_points(rng, 5, scale=0.5)
        for h in (1, 4):
            g = ball6.green_d2_grad2(x, pts, h)
            gfd = fd.gradient(lambda yy: ball6.green_grad2(x, yy)[..., h], pts)
            assert np.max(np.abs(g - gfd)) < 1e-6 * max(1.0, np.max(np.abs(g)))

    def test_mixed_slot_symmetry(self, ball6):
        # G(x,y) = G(y,x) transfers hess12(x,y) to hess12(y,x) transposed
        x = np.array([0.25, -0.1, 0.05, 0.0, 0.2, 0.0])
        y = np.array([-0.3, 0.2, 0.0, 0.15, 0.0, -0.1])
        a = ball6.green_hess12(x, y)
        b = ball6.green_hess12(y, x)
        assert np.allclose(a, b.T, rtol=1e-12, atol=1e-15)

    def test_regular_first_slot_derivatives(self, ball6):
        x = np.array([0.25, -0.1, 0.05, 0.0, 0.2, 0.0])
        rng = stream(19, "reg-d1")
        pts = interior_points(rng, 5, scale=0.5)
        for h in (0, 2):
            vals = ball6.regular_d1(x, pts, h)
            e = np.zeros(6)
            e[h] = 1e-6
            vfd = (ball6.regular(x + e, pts) - ball6.regular(x - e, pts)) / 2e-6
            assert np.max(np.abs(vals - vfd)) < 1e-7
            grads = ball6.regular_d1_grad2(x, pts, h)
            gfd = fd.gradient(lambda yy: ball6.regular_d1(x, yy, h), pts)
            assert np.max(np.abs(grads - gfd)) < 1e-6
