"""Closed-form standard bubble family and its linearization kernel.

The bubble

    U_{x,mu}(y) = c_N mu^{(N-2)/2} / (1 + mu^2 |y-x|^2)^{(N-2)/2},
    c_N = (N(N-2))^{(N-2)/4},

solves -Delta U = U^{(N+2)/(N-2)} on R^N and optimizes the critical Sobolev
embedding.  This module provides the family, the kernel fields of its
linearized operator L(u) = -Delta u - ((N+2)/(N-2)) U^{4/(N-2)} u, the
leading-order boundary-corrected ("projected") bubble on a bounded domain,
and the dimension constants that the rest of the package keeps reaching for:

    A = int U_{0,1}^{(N+2)/(N-2)},   B = int U_{0,1}^2,
    sobolev_level = int U_{0,1}^{2N/(N-2)}   (= S^{N/2}).

Everything here is a pure function; all derivative formulas are direct
closed-form differentiations, so identity tests against them are genuine
cross-checks rather than restatements of the defining PDE.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special as _special

from . import fd
from .quadrature import integrate_radial, unit_sphere_area


@dataclass(frozen=True)
class DimensionContext:
    """Dimension constants for a fixed space dimension n >= 5."""

    n: int
    c_n: float
    omega_n: float
    a_const: float
    b_const: float
    sobolev_level: float

    @property
    def p_exp(self) -> float:
        """Bubble decay exponent (N-2)/2."""
        return (self.n - 2) / 2.0

    @property
    def critical_exp(self) -> float:
        """Critical Sobolev exponent 2N/(N-2)."""
        return 2.0 * self.n / (self.n - 2.0)


@dataclass(frozen=True)
class BubbleParams:
    center: np.ndarray
    height: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.height > 0:
            raise ValueError(f"bubble height must be positive, got {self.height}")


def radial_moment_closed(n: int, p: float) -> float:
    """int_0^inf r^{n-1} (1+r^2)^{-p} dr = (1/2) B(n/2, p - n/2), for p > n/2."""
    return float(0.5 * _special.beta(n / 2.0, p - n / 2.0))


def make_context(n: int, cross_check: bool = True, rel_tol: float = 1e-10) -> DimensionContext:
    """Populate the dimension constants for n >= 5.

    The closed Beta forms are cross-checked against adaptive radial
    quadrature; a mismatch beyond rel_tol is a construction error.
    """
    if n <= 4:
        raise ValueError(
            f"dimension {n} rejected: int U_{{0,1}}^2 diverges for n <= 4, "
            "the mass constant is undefined")
    c_n = (n * (n - 2.0)) ** ((n - 2.0) / 4.0)
    omega_n = unit_sphere_area(n)
    a_const = c_n ** ((n + 2.0) / (n - 2.0)) * omega_n * radial_moment_closed(n, (n + 2.0) / 2.0)
    b_const = c_n**2 * omega_n * radial_moment_closed(n, float(n - 2))
    sobolev_level = c_n ** (2.0 * n / (n - 2.0)) * omega_n * radial_moment_closed(n, float(n))
    ctx = DimensionContext(n, c_n, omega_n, a_const, b_const, sobolev_level)
    if cross_check:
        quad = context_quadrature_values(ctx)
        for name, closed in (("a_const", a_const), ("b_const", b_const),
                             ("sobolev_level", sobolev_level)):
            if abs(quad[name] - closed) > rel_tol * abs(closed):
                raise ArithmeticError(
                    f"quadrature cross-check failed for {name}: "
                    f"closed {closed!r} vs quadrature {quad[name]!r}")
    return ctx


def context_quadrature_values(ctx: DimensionContext) -> dict:
    """A, B and the Sobolev level recomputed by radial quadrature."""
    n, c = ctx.n, ctx.c_n
    return {
        "a_const": integrate_radial(
            lambda r: c ** ((n + 2) / (n - 2)) * (1 + r * r) ** (-(n + 2) / 2), n),
        "b_const": integrate_radial(
            lambda r: c**2 * (1 + r * r) ** (-(n - 2.0)), n),
        "sobolev_level": integrate_radial(
            lambda r: c ** (2 * n / (n - 2)) * (1 + r * r) ** (-float(n)), n),
    }


# ----------------------------------------------------------------------
# bubble family
# ----------------------------------------------------------------------

def _sq_dist(y, center):
    y = np.asarray(y, dtype=float)
    return np.sum((y - center) ** 2, axis=-1)


def bubble_eval(ctx: DimensionContext, p: BubbleParams, y) -> np.ndarray | float:
    """U_{center,height}(y); accepts a single point or an (m, n) batch."""
    r2 = _sq_dist(y, p.center)
    q = ctx.p_exp
    return ctx.c_n * p.height**q / (1.0 + p.height**2 * r2) ** q


def bubble_gradient(ctx: DimensionContext, p: BubbleParams, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    d = y - p.center
    r2 = np.sum(d * d, axis=-1, keepdims=True)
    mu = p.height
    n = ctx.n
    return -ctx.c_n * (n - 2.0) * mu ** ((n + 2.0) / 2.0) * d / (1.0 + mu * mu * r2) ** (n / 2.0)


def bubble_laplacian(ctx: DimensionContext, p: BubbleParams, y) -> np.ndarray | float:
    # direct differentiation; equals -U^{(N+2)/(N-2)} pointwise
    r2 = _sq_dist(y, p.center)
    mu = p.height
    n = ctx.n
    return -n * (n - 2.0) * ctx.c_n * mu ** ((n + 2.0) / 2.0) \
        / (1.0 + mu * mu * r2) ** ((n + 2.0) / 2.0)


# ----------------------------------------------------------------------
# kernel of the linearized operator (unit bubble at the origin)
# ----------------------------------------------------------------------

def kernel_function(ctx: DimensionContext, i: int, y) -> np.ndarray | float:
    """Kernel element psi_i of the linearized operator at U_{0,1}.

    psi_0 is the height derivative of the family at height 1,
    psi_i (i = 1..N) the i-th spatial derivative of U_{0,1}.
    """
    n = ctx.n
    if not 0 <= i <= n:
        raise IndexError(f"kernel index {i} outside 0..{n}")
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1)
    if i == 0:
        return 0.5 * (n - 2.0) * ctx.c_n * (1.0 - r2) / (1.0 + r2) ** (n / 2.0)
    yi = y[..., i - 1]
    return -(n - 2.0) * ctx.c_n * yi / (1.0 + r2) ** (n / 2.0)


def kernel_gradient(ctx: DimensionContext, i: int, y) -> np.ndarray:
    n = ctx.n
    if not 0 <= i <= n:
        raise IndexError(f"kernel index {i} outside 0..{n}")
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1, keepdims=True)
    c = ctx.c_n
    if i == 0:
        # grad of (N-2)/2 c (1-r^2)(1+r^2)^{-N/2}
        coef = 0.5 * (n - 2.0) * c
        return coef * y * (-2.0 / (1.0 + r2) ** (n / 2.0)
                           - n * (1.0 - r2) / (1.0 + r2) ** (n / 2.0 + 1.0))
    e = np.zeros(y.shape[-1])
    e[i - 1] = 1.0
    yi = y[..., i - 1:i]
    return -(n - 2.0) * c * (e / (1.0 + r2) ** (n / 2.0)
                             - n * yi * y / (1.0 + r2) ** (n / 2.0 + 1.0))


def kernel_laplacian(ctx: DimensionContext, i: int, y) -> np.ndarray | float:
    n = ctx.n
    if not 0 <= i <= n:
        raise IndexError(f"kernel index {i} outside 0..{n}")
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1)
    c = ctx.c_n
    if i == 0:
        return -0.5 * (n - 2.0) * c * n * (n + 2.0) * (1.0 - r2) / (1.0 + r2) ** ((n + 4.0) / 2.0)
    yi = y[..., i - 1]
    return (n - 2.0) * c * n * (n + 2.0) * yi / (1.0 + r2) ** ((n + 4.0) / 2.0)


def dilation_eval(ctx: DimensionContext, y) -> np.ndarray | float:
    """The dilation combination y . grad U_{0,1} + ((N-2)/2) U_{0,1}.

    Computed literally from the defining combination; it coincides with the
    kernel element psi_0 and annihilates the linearized operator.
    """
    y = np.asarray(y, dtype=float)
    p = BubbleParams(np.zeros(y.shape[-1]), 1.0)
    grad = bubble_gradient(ctx, p, y)
    return np.sum(y * grad, axis=-1) + ctx.p_exp * bubble_eval(ctx, p, y)


def dilation_gradient(ctx: DimensionContext, y) -> np.ndarray:
    return kernel_gradient(ctx, 0, y)


def dilation_laplacian(ctx: DimensionContext, y) -> np.ndarray | float:
    return kernel_laplacian(ctx, 0, y)


# ----------------------------------------------------------------------
# fields and the linearized operator
# ----------------------------------------------------------------------

@dataclass
class Field:
    """A scalar field with optional analytic derivative closures.

    value(y) accepts (m, n) batches; gradient(y) returns (m, n);
    laplacian(y) returns (m,).  Missing derivatives fall back to central
    finite differences when an operation needs them.
    """

    value: callable
    gradient: callable = None
    laplacian: callable = None
    label: str = ""

    def __call__(self, y):
        return self.value(y)

    def grad(self, y):
        if self.gradient is not None:
            return self.gradient(y)
        return fd.gradient(self.value, y)

    def lap(self, y):
        if self.laplacian is not None:
            return self.laplacian(y)
        return fd.laplacian(self.value, y)


def bubble_field(ctx: DimensionContext, p: BubbleParams) -> Field:
    return Field(lambda y: bubble_eval(ctx, p, y),
                 lambda y: bubble_gradient(ctx, p, y),
                 lambda y: bubble_laplacian(ctx, p, y),
                 label=f"bubble(mu={p.height:g})")


def kernel_field(ctx: DimensionContext, i: int) -> Field:
    return Field(lambda y: kernel_function(ctx, i, y),
                 lambda y: kernel_gradient(ctx, i, y),
                 lambda y: kernel_laplacian(ctx, i, y),
                 label=f"psi_{i}")


def dilation_field(ctx: DimensionContext) -> Field:
    return Field(lambda y: dilation_eval(ctx, y),
                 lambda y: dilation_gradient(ctx, y),
                 lambda y: dilation_laplacian(ctx, y),
                 label="dilation")


def linearized_apply(ctx: DimensionContext, u, y) -> np.ndarray | float:
    """(-Delta u - ((N+2)/(N-2)) U_{0,1}^{4/(N-2)} u)(y).

    u may be a Field (analytic Laplacian used when present) or a plain
    callable, in which case the Laplacian is second-order finite differences.
    """
    y = np.asarray(y, dtype=float)
    if isinstance(u, Field):
        lap = u.lap(y)
        val = u.value(y)
    else:
        lap = fd.laplacian(u, y)
        val = u(y)
    n = ctx.n
    unit = BubbleParams(np.zeros(y.shape[-1]), 1.0)
    pot = bubble_eval(ctx, unit, y) ** (4.0 / (n - 2.0))
    return -lap - (n + 2.0) / (n - 2.0) * pot * val


def pohozaev_kernel_moment(ctx: DimensionContext) -> float:
    """int U_{0,1} (y . grad U_{0,1} + ((N-2)/2) U_{0,1}) by radial quadrature.

    Contract: equals -B (the dilation pairing loses exactly one mass unit).
    """
    n, c = ctx.n, ctx.c_n
    q = ctx.p_exp

    def profile(r):
        u = c / (1.0 + r * r) ** q
        xg = -(n - 2.0) * c * r * r / (1.0 + r * r) ** (n / 2.0)
        return u * (xg + q * u)

    return integrate_radial(profile, n)


# ----------------------------------------------------------------------
# projected bubble (leading-order boundary correction)
# ----------------------------------------------------------------------

def projected_bubble_eval(ctx: DimensionContext, kernel, p: BubbleParams, y,
                          warn_threshold: float = 10.0) -> np.ndarray | float:
    """Leading-order zero-boundary bubble U - A mu^{-(N-2)/2} H(center, .).

    The correction coefficient A comes from matching the bubble's far field
    c_N mu^{-(N-2)/2} |y-x|^{2-N} against A/((N-2) omega_N); the discarded
    remainder is O(mu^{-(N+2)/2}).  Warns when height * boundary distance
    drops below warn_threshold, where the correction stops being
    perturbative.
    """
    _check_projection_regime(ctx, kernel, p, warn_threshold)
    u = bubble_eval(ctx, p, y)
    h = kernel.regular(p.center, y)
    return u - ctx.a_const * p.height ** (-ctx.p_exp) * h


def projected_bubble_gradient(ctx: DimensionContext, kernel, p: BubbleParams, y) -> np.ndarray:
    g = bubble_gradient(ctx, p, y)
    gh = kernel.regular_grad2(p.center, y)
    return g - ctx.a_const * p.height ** (-ctx.p_exp) * gh


def projected_bubble_field(ctx: DimensionContext, kernel, p: BubbleParams) -> Field:
    _check_projection_regime(ctx, kernel, p, 10.0)
    amp = ctx.a_const * p.height ** (-ctx.p_exp)
    return Field(
        lambda y: bubble_eval(ctx, p, y) - amp * kernel.regular(p.center, y),
        lambda y: bubble_gradient(ctx, p, y) - amp * kernel.regular_grad2(p.center, y),
        # the regular part is harmonic, so the correction drops out
        lambda y: bubble_laplacian(ctx, p, y),
        label=f"projected-bubble(mu={p.height:g})")


def _check_projection_regime(ctx, kernel, p, warn_threshold):
    if not kernel.contains(p.center):
        raise ValueError("projected bubble center must lie inside the domain")
    dist = kernel.boundary_distance(p.center)
    if p.height * dist < warn_threshold:
        warnings.warn(
            f"projected bubble is outside the perturbative regime: "
            f"height*dist = {p.height * dist:.3g} < {warn_threshold}",
            stacklevel=3)
