"""Dirichlet Green's function kernels for concrete bounded domains.

A kernel object exposes the splitting G(x,y) = S(x,y) - H(x,y) with

    S(x,y) = ((N-2) omega_N)^{-1} |x-y|^{2-N}

the free-space singular part, H the regular part (harmonic in each slot,
equal to S on the boundary), and the Robin function R(x) = H(x,x), together
with first and second derivatives of everything, membership predicates and
boundary distances.

Balls get the exact Kelvin image kernel, written through

    w(x,y) = |x-c|^2 |y-c|^2 / rho^2 - 2 (x-c).(y-c) + rho^2,
    H(x,y) = kappa w(x,y)^{(2-N)/2},      kappa = ((N-2) omega_N)^{-1},

which is symmetric, strictly positive inside the ball and smooth through
x = c, so every derivative is a short closed form.  Any other domain enters
through a tabulated regular part (``tabulated_kernel``) with multilinear
interpolation and finite-difference derivatives.
"""

import io
import struct
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import fd
from .quadrature import unit_sphere_area


class DomainError(ValueError):
    """A point left the domain a kernel is defined on."""


NEAR_DIAGONAL = 1e-10          # green() refuses |x - y| below this
BOUNDARY_CONDITIONING = 1e-8   # robin derivatives refuse dist < this * radius


def _as_batch(y, n):
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    if y.shape[-1] != n:
        raise ValueError(f"expected points in R^{n}, got shape {y.shape}")
    return (y[None, :] if single else y), single


class SingularPart:
    """Free-space part S and its derivative fields; needs self.n, self.kappa."""

    def singular(self, x, y):
        yb, single = _as_batch(y, self.n)
        d = np.linalg.norm(yb - np.asarray(x, dtype=float), axis=-1)
        if np.any(d < NEAR_DIAGONAL):
            raise DomainError("singular part evaluated within 1e-10 of the diagonal")
        out = self.kappa * d ** (2.0 - self.n)
        return float(out[0]) if single else out

    def singular_grad2(self, x, y):
        yb, single = _as_batch(y, self.n)
        d = yb - np.asarray(x, dtype=float)
        r = np.linalg.norm(d, axis=-1, keepdims=True)
        out = self.kappa * (2.0 - self.n) * r ** (-float(self.n)) * d
        return out[0] if single else out

    # first-slot derivative of S as a field of y, and its y-gradient
    def singular_d1(self, x, y, h: int):
        yb, single = _as_batch(y, self.n)
        d = np.asarray(x, dtype=float) - yb
        r = np.linalg.norm(d, axis=-1)
        out = self.kappa * (2.0 - self.n) * r ** (-float(self.n)) * d[..., h]
        return float(out[0]) if single else out

    def singular_d1_grad2(self, x, y, h: int):
        yb, single = _as_batch(y, self.n)
        d = np.asarray(x, dtype=float) - yb
        r = np.linalg.norm(d, axis=-1, keepdims=True)
        e = np.zeros(self.n)
        e[h] = 1.0
        out = -self.kappa * (2.0 - self.n) * (
            r ** (-float(self.n)) * e
            - self.n * r ** (-float(self.n) - 2.0) * d[..., h:h + 1] * d)
        return out[0] if single else out

    # second-slot derivative of S and its y-gradient
    def singular_d2(self, x, y, h: int):
        return self.singular_grad2(x, y)[..., h]

    def singular_d2_grad2(self, x, y, h: int):
        yb, single = _as_batch(y, self.n)
        d = yb - np.asarray(x, dtype=float)
        r = np.linalg.norm(d, axis=-1, keepdims=True)
        e = np.zeros(self.n)
        e[h] = 1.0
        out = self.kappa * (2.0 - self.n) * (
            r ** (-float(self.n)) * e
            - self.n * r ** (-float(self.n) - 2.0) * d[..., h:h + 1] * d)
        return out[0] if single else out


@dataclass(frozen=True)
class BallKernel(SingularPart):
    """Exact image-method kernel of the ball B(center, radius) in R^n."""

    n: int
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    # -- geometry ------------------------------------------------------
    @property
    def kappa(self) -> float:
        return 1.0 / ((self.n - 2.0) * unit_sphere_area(self.n))

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, x, open_set: bool = False) -> bool:
        r = np.linalg.norm(np.asarray(x, dtype=float) - self.center)
        return r < self.radius if open_set else r <= self.radius * (1.0 + 1e-12)

    def boundary_distance(self, x) -> float:
        return self.radius - float(np.linalg.norm(np.asarray(x, dtype=float) - self.center))

    def interior_point(self, rng) -> np.ndarray:
        z = rng.standard_normal(self.n)
        z /= np.linalg.norm(z)
        r = self.radius * rng.random() ** (1.0 / self.n)
        return self.center + r * z

    def _require_inside(self, *points):
        for pt in points:
            arr = np.asarray(pt, dtype=float)
            rad = np.linalg.norm(arr - self.center, axis=-1)
            if np.any(rad > self.radius * (1.0 + 1e-12)):
                raise DomainError(
                    f"point outside the closed ball (|x-c| up to {float(np.max(rad)):g}, "
                    f"radius {self.radius:g})")

    # -- w and its derivatives ------------------------------------------
    def _w(self, x, y):
        xt = np.asarray(x, dtype=float) - self.center
        yt = y - self.center
        return (np.sum(xt * xt) * np.sum(yt * yt, axis=-1) / self.radius**2
                - 2.0 * yt @ xt + self.radius**2)

    # -- scalar kernels --------------------------------------------------
    def regular(self, x, y):
        self._require_inside(x, y)
        yb, single = _as_batch(y, self.n)
        out = self.kappa * self._w(x, yb) ** ((2.0 - self.n) / 2.0)
        return float(out[0]) if single else out

    def green(self, x, y):
        self._require_inside(x, y)
        return self.singular(x, y) - self.regular(x, y)

    # -- second-slot derivatives (fields of y) ----------------------------
    def regular_grad2(self, x, y):
        yb, single = _as_batch(y, self.n)
        xt = np.asarray(x, dtype=float) - self.center
        yt = yb - self.center
        w = self._w(x, yb)[..., None]
        gw = 2.0 * yt * np.sum(xt * xt) / self.radius**2 - 2.0 * xt
        out = self.kappa * ((2.0 - self.n) / 2.0) * w ** (-self.n / 2.0) * gw
        return out[0] if single else out

    def green_grad2(self, x, y):
        return self.singular_grad2(x, y) - self.regular_grad2(x, y)

    def regular_d2(self, x, y, h: int):
        return self.regular_grad2(x, y)[..., h]

    def regular_d2_grad2(self, x, y, h: int):
        """y-gradient of the field y -> [grad_y H(x, y)]_h."""
        yb, single = _as_batch(y, self.n)
        xt = np.asarray(x, dtype=float) - self.center
        yt = yb - self.center
        w = self._w(x, yb)[..., None]
        gw = 2.0 * yt * np.sum(xt * xt) / self.radius**2 - 2.0 * xt
        p = (2.0 - self.n) / 2.0
        e = np.zeros(self.n)
        e[h] = 1.0
        out = self.kappa * (p * (p - 1.0) * w ** (p - 2.0) * gw[..., h:h + 1] * gw
                            + p * w ** (p - 1.0)
                            * (2.0 * np.sum(xt * xt) / self.radius**2) * e)
        return out[0] if single else out

    def green_d2_grad2(self, x, y, h: int):
        """y-gradient of the field y -> [grad_y G(x, y)]_h."""
        return self.singular_d2_grad2(x, y, h) - self.regular_d2_grad2(x, y, h)

    # -- first-slot derivatives ------------------------------------------
    def green_grad1(self, x, y):
        """grad_x G(x, y) for each y in the batch."""
        yb, single = _as_batch(y, self.n)
        x = np.asarray(x, dtype=float)
        d = x - yb
        r = np.linalg.norm(d, axis=-1, keepdims=True)
        gS = self.kappa * (2.0 - self.n) * r ** (-float(self.n)) * d
        xt = x - self.center
        yt = yb - self.center
        w = self._w(x, yb)[..., None]
        gw = 2.0 * xt * np.sum(yt * yt, axis=-1, keepdims=True) / self.radius**2 - 2.0 * yt
        gH = self.kappa * ((2.0 - self.n) / 2.0) * w ** (-self.n / 2.0) * gw
        out = gS - gH
        return out[0] if single else out

    def green_d1(self, x, y, h: int):
        """Component h of grad_x G(x, .), as a scalar field of y."""
        return self.green_grad1(x, y)[..., h]

    def regular_d1(self, x, y, h: int):
        """Component h of grad_x H(x, .), as a scalar field of y."""
        yb, single = _as_batch(y, self.n)
        x = np.asarray(x, dtype=float)
        xt = x - self.center
        yt = yb - self.center
        w = self._w(x, yb)
        gwx_h = 2.0 * xt[h] * np.sum(yt * yt, axis=-1) / self.radius**2 - 2.0 * yt[..., h]
        out = self.kappa * ((2.0 - self.n) / 2.0) * w ** (-self.n / 2.0) * gwx_h
        return float(out[0]) if single else out

    def regular_d1_grad2(self, x, y, h: int):
        """y-gradient of the field y -> [grad_x H(x, y)]_h."""
        yb, single = _as_batch(y, self.n)
        x = np.asarray(x, dtype=float)
        xt = x - self.center
        yt = yb - self.center
        w = self._w(x, yb)[..., None]
        gwx_h = (2.0 * xt[h] * np.sum(yt * yt, axis=-1, keepdims=True) / self.radius**2
                 - 2.0 * yt[..., h:h + 1])
        gwy = 2.0 * yt * np.sum(xt * xt) / self.radius**2 - 2.0 * xt
        e = np.zeros(self.n)
        e[h] = 1.0
        wxy_h = 4.0 * xt[h] * yt / self.radius**2 - 2.0 * e
        p = (2.0 - self.n) / 2.0
        out = self.kappa * (p * (p - 1.0) * w ** (p - 2.0) * gwx_h * gwy
                            + p * w ** (p - 1.0) * wxy_h)
        return out[0] if single else out

    def green_d1_grad2(self, x, y, h: int):
        """y-gradient of the field y -> [grad_x G(x, y)]_h (row h of hess12)."""
        return self.singular_d1_grad2(x, y, h) - self.regular_d1_grad2(x, y, h)

    def green_hess11(self, x, y):
        """Hessian of G in the first slot at a single pair (x, y)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = x - y
        r = np.linalg.norm(d)
        n, kap = self.n, self.kappa
        hS = kap * (2.0 - n) * (r ** (-float(n)) * np.eye(n)
                                - n * r ** (-float(n) - 2.0) * np.outer(d, d))
        xt = x - self.center
        yt = y - self.center
        w = float(self._w(x, y[None, :])[0])
        gw = 2.0 * xt * np.sum(yt * yt) / self.radius**2 - 2.0 * yt
        p = (2.0 - n) / 2.0
        hH = kap * (p * (p - 1.0) * w ** (p - 2.0) * np.outer(gw, gw)
                    + p * w ** (p - 1.0)
                    * (2.0 * np.sum(yt * yt) / self.radius**2) * np.eye(n))
        return hS - hH

    def green_hess12(self, x, y):
        """Mixed Hessian [d^2 G / dx_a dy_b] at a single pair (x, y)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = x - y
        r = np.linalg.norm(d)
        n, kap = self.n, self.kappa
        hS12 = -kap * (2.0 - n) * (r ** (-float(n)) * np.eye(n)
                                   - n * r ** (-float(n) - 2.0) * np.outer(d, d))
        xt = x - self.center
        yt = y - self.center
        w = float(self._w(x, y[None, :])[0])
        gwx = 2.0 * xt * np.sum(yt * yt) / self.radius**2 - 2.0 * yt
        gwy = 2.0 * yt * np.sum(xt * xt) / self.radius**2 - 2.0 * xt
        wxy = 4.0 * np.outer(xt, yt) / self.radius**2 - 2.0 * np.eye(n)
        p = (2.0 - n) / 2.0
        hH12 = kap * (p * (p - 1.0) * w ** (p - 2.0) * np.outer(gwx, gwy)
                      + p * w ** (p - 1.0) * wxy)
        return hS12 - hH12

    # -- Robin function ----------------------------------------------------
    def robin(self, x):
        self._require_inside(x)
        xt = np.asarray(x, dtype=float) - self.center
        gap = self.radius**2 - np.sum(xt * xt)
        return self.kappa * (self.radius / gap) ** (self.n - 2.0)

    def _require_conditioned(self, x):
        if self.boundary_distance(x) < BOUNDARY_CONDITIONING * self.radius:
            raise DomainError(
                "Robin derivatives are ill-conditioned within "
                f"{BOUNDARY_CONDITIONING:g}*radius of the boundary")

    def robin_grad(self, x):
        self._require_inside(x)
        self._require_conditioned(x)
        xt = np.asarray(x, dtype=float) - self.center
        gap = self.radius**2 - np.sum(xt * xt)
        n = self.n
        return 2.0 * self.kappa * (n - 2.0) * self.radius ** (n - 2.0) * gap ** (1.0 - n) * xt

    def robin_hess(self, x):
        self._require_inside(x)
        self._require_conditioned(x)
        xt = np.asarray(x, dtype=float) - self.center
        gap = self.radius**2 - np.sum(xt * xt)
        n = self.n
        lead = 2.0 * self.kappa * (n - 2.0) * self.radius ** (n - 2.0)
        return lead * (gap ** (1.0 - n) * np.eye(n)
                       + 2.0 * (n - 1.0) * gap ** (-float(n)) * np.outer(xt, xt))


def ball_kernel(ctx, center, radius: float) -> BallKernel:
    """Analytic kernel of B(center, radius); ctx fixes the dimension."""
    n = ctx.n if hasattr(ctx, "n") else int(ctx)
    center = np.asarray(center, dtype=float)
    if center.shape != (n,):
        raise ValueError(f"center must be a point in R^{n}")
    return BallKernel(n, center, float(radius))


# ----------------------------------------------------------------------
# tabulated kernels (regular part sampled on a tensor grid over Omega x Omega)
# ----------------------------------------------------------------------

MAGIC = b"SPKGRN1\x00"
SHAPE_BALL = 1


class TabulatedKernelError(ValueError):
    """Malformed or inconsistent kernel table file."""


class TabulatedKernel(SingularPart):
    """Kernel whose regular part is multilinear interpolation of a table.

    The table stores H on a uniform tensor grid over a box in
    Omega x Omega (2n axes); G = S - H_interp, the Robin function is the
    interpolated diagonal, and the derivative stack is finite differences.
    ``interp_error_estimate`` bounds the multilinear interpolation error
    from the grid's second differences.
    """

    INTERP_METHODS = {1: "linear", 3: "cubic"}

    def __init__(self, n, shape_id, shape_params, axes, values, order: int = 1):
        self.n = int(n)
        self.shape_id = int(shape_id)
        self.shape_params = np.asarray(shape_params, dtype=float)
        self.axes = axes            # list of 1-d grids, length 2n
        self.values = values        # ndarray with shape tuple(len(ax) for ax)
        if self.shape_id != SHAPE_BALL:
            raise TabulatedKernelError(f"unknown shape id {shape_id}")
        if order not in self.INTERP_METHODS:
            raise TabulatedKernelError(
                f"unsupported interpolation order {order}; "
                f"choose one of {sorted(self.INTERP_METHODS)}")
        self.order = int(order)
        self.center = self.shape_params[:self.n]
        self.radius = float(self.shape_params[self.n])
        self._interp = RegularGridInterpolator(
            axes, values, method=self.INTERP_METHODS[order], bounds_error=True)
        self.interp_error_estimate = self._error_estimate()
        self.kappa = 1.0 / ((self.n - 2.0) * unit_sphere_area(self.n))
        self._validate_symmetry()

    # -- metadata ----------------------------------------------------------
    def _error_estimate(self) -> float:
        # multilinear error <= (1/8) sum_i h_i^2 max |d^2 H / du_i^2|,
        # with the second derivative bounded by grid second differences
        est = 0.0
        for axis in range(len(self.axes)):
            if self.values.shape[axis] < 3:
                continue
            second = np.diff(self.values, n=2, axis=axis)
            est += float(np.max(np.abs(second))) / 8.0
        return est

    def _validate_symmetry(self, tol: float = 1e-6):
        half = len(self.axes) // 2
        same_box = all(
            len(self.axes[i]) == len(self.axes[half + i])
            and np.allclose(self.axes[i], self.axes[half + i])
            for i in range(half))
        if not same_box:
            return
        perm = list(range(half, 2 * half)) + list(range(half))
        swapped = np.transpose(self.values, perm)
        gap = float(np.max(np.abs(self.values - swapped)))
        if gap > tol:
            raise TabulatedKernelError(
                f"regular-part samples are asymmetric beyond tolerance: "
                f"max |H(x,y)-H(y,x)| = {gap:g} > {tol:g}")

    # -- geometry -----------------------------------------------------------
    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, x, open_set: bool = False) -> bool:
        r = np.linalg.norm(np.asarray(x, dtype=float) - self.center)
        return r < self.radius if open_set else r <= self.radius * (1.0 + 1e-12)

    def boundary_distance(self, x) -> float:
        return self.radius - float(np.linalg.norm(np.asarray(x, dtype=float) - self.center))

    def interior_point(self, rng) -> np.ndarray:
        lo = np.array([ax[0] for ax in self.axes[:self.n]])
        hi = np.array([ax[-1] for ax in self.axes[:self.n]])
        return lo + (hi - lo) * rng.random(self.n)

    # -- kernels --------------------------------------------------------------
    def regular(self, x, y):
        yb, single = _as_batch(y, self.n)
        x = np.asarray(x, dtype=float)
        pts = np.concatenate([np.broadcast_to(x, yb.shape), yb], axis=-1)
        try:
            out = self._interp(pts)
        except ValueError as exc:
            raise DomainError(f"evaluation outside the tabulated region: {exc}") from exc
        return float(out[0]) if single else out

    def green(self, x, y):
        return self.singular(x, y) - self.regular(x, y)

    def regular_grad2(self, x, y):
        return fd.gradient(lambda yy: self.regular(x, yy), y, h=self._fd_step())

    def green_grad2(self, x, y):
        yb, single = _as_batch(y, self.n)
        out = self.singular_grad2(x, yb) - self.regular_grad2(x, yb)
        return out[0] if single else out

    def green_grad1(self, x, y):
        yb, single = _as_batch(y, self.n)
        h = self._fd_step()
        out = np.empty_like(yb)
        x = np.asarray(x, dtype=float)
        for a in range(self.n):
            e = np.zeros(self.n)
            e[a] = h
            out[:, a] = (self.green(x + e, yb) - self.green(x - e, yb)) / (2.0 * h)
        return out[0] if single else out

    def green_d1(self, x, y, h: int):
        return self.green_grad1(x, y)[..., h]

    def regular_d1(self, x, y, h: int):
        step = self._fd_step()
        e = np.zeros(self.n)
        e[h] = step
        x = np.asarray(x, dtype=float)
        return (self.regular(x + e, y) - self.regular(x - e, y)) / (2.0 * step)

    def regular_d1_grad2(self, x, y, h: int):
        step = self._fd_step()
        e = np.zeros(self.n)
        e[h] = step
        x = np.asarray(x, dtype=float)
        return (self.regular_grad2(x + e, y) - self.regular_grad2(x - e, y)) / (2.0 * step)

    def green_d1_grad2(self, x, y, h: int):
        return self.singular_d1_grad2(x, y, h) - self.regular_d1_grad2(x, y, h)

    def regular_d2(self, x, y, h: int):
        return self.regular_grad2(x, y)[..., h]

    def regular_d2_grad2(self, x, y, h: int):
        step = self._fd_step()
        x = np.asarray(x, dtype=float)

        def comp(pts):
            return self.regular_grad2(x, pts)[..., h]

        return fd.gradient(comp, y, h=step)

    def green_d2_grad2(self, x, y, h: int):
        return self.singular_d2_grad2(x, y, h) - self.regular_d2_grad2(x, y, h)

    def green_hess11(self, x, y):
        y = np.asarray(y, dtype=float)
        return fd.hessian(lambda xx: self.green(xx, y), x, h=self._fd_step())

    def green_hess12(self, x, y):
        step = self._fd_step()
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.empty((self.n, self.n))
        for a in range(self.n):
            ea = np.zeros(self.n)
            ea[a] = step
            out[a] = (self.green_grad2(x + ea, y) - self.green_grad2(x - ea, y)) / (2.0 * step)
        return out

    def robin(self, x):
        x = np.asarray(x, dtype=float)
        return self.regular(x, x)

    def robin_grad(self, x):
        self._require_conditioned(x)

        def rb(xs):
            return np.array([self.robin(p) for p in np.atleast_2d(xs)])

        return fd.gradient(rb, x, h=self._fd_step())

    def robin_hess(self, x):
        self._require_conditioned(x)
        return fd.hessian(self.robin, x, h=self._fd_step())

    def _require_conditioned(self, x):
        if self.boundary_distance(x) < BOUNDARY_CONDITIONING * self.radius:
            raise DomainError("Robin derivatives refused this close to the boundary")

    def _fd_step(self) -> float:
        # a quarter grid cell keeps FD stencils inside adjacent cells
        return min(float(ax[1] - ax[0]) for ax in self.axes) / 4.0


def write_kernel_table(path, n, shape_params, axes, values):
    """Serialize a regular-part table in the SPKGRN1 binary layout.

    Layout (little-endian): magic "SPKGRN1\\0"; uint32 n; uint32 shape id
    (1 = ball); float64 shape params (center, radius); uint32 axis count
    (= 2n); per axis uint32 point count, float64 lo, float64 hi; float64
    values in row-major order over the axes (x_1..x_n, y_1..y_n).
    """
    values = np.asarray(values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", n, SHAPE_BALL))
        fh.write(np.asarray(shape_params, dtype="<f8").tobytes())
        fh.write(struct.pack("<I", len(axes)))
        for ax in axes:
            ax = np.asarray(ax, dtype=float)
            fh.write(struct.pack("<Idd", len(ax), float(ax[0]), float(ax[-1])))
        fh.write(values.tobytes(order="C"))


def tabulated_kernel(path, order: int = 1) -> TabulatedKernel:
    """Load a SPKGRN1 kernel table; validates structure and symmetry.

    order selects the interpolation rule: 1 multilinear (default),
    3 tensor cubic (needs at least four points per axis).
    """
    with open(path, "rb") as fh:
        data = fh.read()
    buf = io.BytesIO(data)
    magic = buf.read(len(MAGIC))
    if magic != MAGIC:
        raise TabulatedKernelError(
            f"bad magic {magic!r}; expected {MAGIC!r} (empty or foreign file?)")
    try:
        n, shape_id = struct.unpack("<II", buf.read(8))
        shape_params = np.frombuffer(buf.read(8 * (n + 1)), dtype="<f8")
        (axis_count,) = struct.unpack("<I", buf.read(4))
        if axis_count != 2 * n:
            raise TabulatedKernelError(
                f"axis count {axis_count} does not match 2n = {2 * n}")
        axes = []
        shape = []
        for _ in range(axis_count):
            m, lo, hi = struct.unpack("<Idd", buf.read(20))
            if m < 2 or not lo < hi:
                raise TabulatedKernelError(f"degenerate axis: {m} points on [{lo}, {hi}]")
            axes.append(np.linspace(lo, hi, m))
            shape.append(m)
        expected = int(np.prod(shape))
        raw = buf.read(8 * expected)
        if len(raw) != 8 * expected:
            raise TabulatedKernelError(
                f"value block truncated: expected {expected} float64s")
        values = np.frombuffer(raw, dtype="<f8").reshape(shape)
    except struct.error as exc:
        raise TabulatedKernelError(f"truncated header: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise TabulatedKernelError("table contains non-finite values")
    return TabulatedKernel(n, shape_id, shape_params, axes, values, order=order)
