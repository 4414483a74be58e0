"""Tabulated regular-part kernels and the SPKGRN1 table format."""

import numpy as np
import pytest

import spikekit as sk
from spikekit.greens import (DomainError, TabulatedKernelError,
                             tabulated_kernel, write_kernel_table)
from spikekit.rng import stream


N = 5
BOX = 0.25
POINTS = 4


@pytest.fixture(scope="module")
def ctx5():
    return sk.make_context(5, cross_check=False)


@pytest.fixture(scope="module")
def ball5(ctx5):
    return sk.ball_kernel(ctx5, np.zeros(N), 1.0)


@pytest.fixture(scope="module")
def table_path(tmp_path_factory, ball5):
    """Unit-ball regular part sampled on a [-.25, .25]^10 tensor grid."""
    path = tmp_path_factory.mktemp("kern") / "ball5.spkgrn"
    axes = [np.linspace(-BOX, BOX, POINTS)] * (2 * N)
    x_grid = np.stack(np.meshgrid(*axes[:N], indexing="ij"), axis=-1).reshape(-1, N)
    y_grid = x_grid.copy()
    values = np.empty((len(x_grid), len(y_grid)))
    for idx, x in enumerate(x_grid):
        values[idx] = ball5.regular(x, y_grid)
    write_kernel_table(path, N, np.concatenate([np.zeros(N), [1.0]]),
                       axes, values.reshape([POINTS] * (2 * N)))
    return path


@pytest.fixture(scope="module")
def tab5(table_path):
    return tabulated_kernel(table_path)


class TestRoundTrip:
    def test_metadata(self, tab5):
        assert tab5.n == N
        assert tab5.radius == 1.0
        assert tab5.interp_error_estimate > 0

    def test_interpolation_error_bounded_by_estimate(self, tab5, ball5):
        rng = stream(21, "tab")
        pts = (rng.random((200, 2 * N)) * 2 - 1) * BOX
        worst = 0.0
        for row in pts:
            x, y = row[:N], row[N:]
            worst = max(worst, abs(tab5.regular(x, y) - ball5.regular(x, y)))
        assert worst <= tab5.interp_error_estimate

    def test_grid_nodes_exact(self, tab5, ball5):
        x = np.full(N, -BOX)
        y = np.full(N, BOX)
        assert tab5.regular(x, y) == pytest.approx(ball5.regular(x, y), rel=1e-12)

    def test_green_and_robin_track_analytic(self, tab5, ball5):
        rng = stream(22, "tab-g")
        for _ in range(20):
            x = (rng.random(N) * 2 - 1) * BOX
            y = (rng.random(N) * 2 - 1) * BOX
            if np.linalg.norm(x - y) < 0.05:
                continue
            assert tab5.green(x, y) == pytest.approx(
                ball5.green(x, y), abs=1.5 * tab5.interp_error_estimate)
        assert tab5.robin(np.zeros(N)) == pytest.approx(
            ball5.robin(np.zeros(N)), abs=1.5 * tab5.interp_error_estimate)

    def test_derivative_stack_runs(self, tab5, ball5):
        x = np.full(N, 0.08)
        y = np.full(N, -0.11)
        g = tab5.green_grad2(x, y)
        ga = ball5.green_grad2(x, y)
        # finite differences of a multilinear table: low accuracy, right scale
        assert np.linalg.norm(g - ga) < 0.5 * np.linalg.norm(ga)
        assert tab5.green_grad1(x, y).shape == (N,)

    def test_interaction_matrix_consistent(self, tab5, ball5, ctx5):
        pts = np.array([np.full(N, 0.1), np.full(N, -0.12)])
        m_tab = sk.interaction_matrix(tab5, pts)
        m_ball = sk.interaction_matrix(ball5, pts)
        assert np.max(np.abs(m_tab - m_ball)) < 2 * tab5.interp_error_estimate

    def test_cubic_order_sharper(self):
        # cubic interpolation is only affordable at few axes; exercise the
        # configurable order on a three-dimensional ball (six grid axes)
        from spikekit.greens import BallKernel, TabulatedKernel

        n, pts, box = 3, 4, 0.3
        ball = BallKernel(n, np.zeros(n), 1.0)
        axes = [np.linspace(-box, box, pts)] * (2 * n)
        xg = np.stack(np.meshgrid(*axes[:n], indexing="ij"), axis=-1).reshape(-1, n)
        vals = np.empty((len(xg), len(xg)))
        for i, x in enumerate(xg):
            vals[i] = ball.regular(x, xg)
        vals = vals.reshape([pts] * (2 * n))
        params = np.concatenate([np.zeros(n), [1.0]])
        linear = TabulatedKernel(n, 1, params, axes, vals, order=1)
        cubic = TabulatedKernel(n, 1, params, axes, vals, order=3)
        rng = stream(30, "cubic")
        pairs = (rng.random((25, 2, n)) * 2 - 1) * box
        worst_lin = worst_cub = 0.0
        for x, y in pairs:
            exact = ball.regular(x, y)
            worst_lin = max(worst_lin, abs(linear.regular(x, y) - exact))
            worst_cub = max(worst_cub, abs(cubic.regular(x, y) - exact))
        assert worst_cub < worst_lin

    def test_unsupported_order_rejected(self, table_path):
        with pytest.raises(TabulatedKernelError, match="order"):
            tabulated_kernel(table_path, order=2)


class TestValidation:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.spkgrn"
        path.write_bytes(b"")
        with pytest.raises(TabulatedKernelError, match="magic"):
            tabulated_kernel(path)

    def test_foreign_magic(self, tmp_path):
        path = tmp_path / "foreign.spkgrn"
        path.write_bytes(b"NOTAKERN" + b"\x00" * 64)
        with pytest.raises(TabulatedKernelError, match="magic"):
            tabulated_kernel(path)

    def test_truncated_values(self, tmp_path, table_path):
        data = table_path.read_bytes()
        path = tmp_path / "trunc.spkgrn"
        path.write_bytes(data[:-16])
        with pytest.raises(TabulatedKernelError, match="truncated"):
            tabulated_kernel(path)

    def test_asymmetric_samples_rejected(self, tmp_path, tab5):
        # bump an off-diagonal entry well beyond the 1e-6 symmetry tolerance
        values = tab5.values.copy()
        idx = (0,) * N + (POINTS - 1,) * N
        values[idx] += 1e-3
        path = tmp_path / "asym.spkgrn"
        write_kernel_table(path, N, np.concatenate([np.zeros(N), [1.0]]),
                           tab5.axes, values)
        with pytest.raises(TabulatedKernelError, match="asymmetric"):
            tabulated_kernel(path)

    def test_outside_covered_region(self, tab5):
        x = np.full(N, 0.1)
        y = np.full(N, 0.9)
        with pytest.raises(DomainError, match="outside"):
            tab5.regular(x, y)

    def test_non_finite_rejected(self, tmp_path, table_path):
        data = bytearray(table_path.read_bytes())
        data[-8:] = np.array([np.nan], dtype="<f8").tobytes()
        path = tmp_path / "nan.spkgrn"
        path.write_bytes(bytes(data))
        with pytest.raises(TabulatedKernelError, match="non-finite"):
            tabulated_kernel(path)
