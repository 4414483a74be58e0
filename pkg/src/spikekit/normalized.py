"""Mass-to-parameters map for normalized multi-spike approximations.

Given a classified critical point of the reduced functional (limit heights
mu_1..mu_k at locations a_1..a_k) and a small prescribed mass rho, the
leading-order matching between the concentration-rate law

    mu_{j,rho} = (lambda_rho^{1/(N-4)} mu_j)^{-1}

and the mass expansion  sum_j B / mu_{j,rho}^2 = rho  closes in closed form:

    lambda_rho = (rho / (B sum_j mu_j^2))^{(N-4)/2},
    mu_{j,rho} = sqrt(B sum_i mu_i^2 / rho) / mu_j.

Both normalization conventions in circulation are reported: the rate-law
convention above, and the inverse-height labeling in which the limit
constants read (B sum mu_i^{-2})^{1/2} mu_j and (B sum mu_i^{-2})^{(4-N)/2}.
The two agree under mu_j <-> 1/mu_j; neither is silently corrected.

The approximate profile is the sum of leading-order projected bubbles at the
predicted heights; its mass and concentration energy are estimated by
spike-importance Monte Carlo and compared against rho and k * S^{N/2}.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bubble import (BubbleParams, DimensionContext, Field, bubble_eval,
                     projected_bubble_field)
from .quadrature import QuadratureResult, QuadratureSpec, integrate_ball
from .reduced import CriticalPointRecord

SMALLNESS_HEIGHT_DIST = 10.0
OVERLAP_LEVEL = 0.01


@dataclass
class PredictionRecord:
    rho: float
    lambda_rho: float
    spike_points: np.ndarray
    spike_heights: np.ndarray
    limit_heights: np.ndarray
    energy_prediction: float
    matching_residuals: tuple
    conventions: dict
    warnings: list = field(default_factory=list)
    mass_check: QuadratureResult | None = None
    energy_check: QuadratureResult | None = None
    localization: np.ndarray | None = None
    pohozaev_residuals: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.spike_points.shape[0]


def predict_parameters(ctx: DimensionContext, record: CriticalPointRecord,
                       rho: float, kernel=None) -> PredictionRecord:
    """Solve the leading-order mass matching for multiplier and heights."""
    if rho <= 0:
        raise ValueError("mass rho must be positive")
    if record.nondegenerate is False or record.m_positive is False:
        raise ValueError(
            "predictions require a nondegenerate critical point with positive "
            "interaction matrix")
    mu = record.configuration.heights
    pts = record.configuration.points
    b = ctx.b_const
    n = ctx.n
    ssq = float(np.sum(mu**2))
    lam = (rho / (b * ssq)) ** ((n - 4.0) / 2.0)
    heights = np.sqrt(b * ssq / rho) / mu

    res_rate = float(np.max(np.abs(lam ** (1.0 / (n - 4.0)) * heights * mu - 1.0)))
    res_mass = abs(float(np.sum(b / heights**2)) - rho) / rho
    energy = record.configuration.k * ctx.sobolev_level

    inv_ssq = float(np.sum(mu**-2.0))
    conventions = {
        "rate_law": {
            "lambda_rho": lam,
            "heights": heights.tolist(),
            "scaled_lambda": lam * rho ** ((4.0 - n) / 2.0),
            "scaled_heights": (np.sqrt(rho) * heights).tolist(),
        },
        "inverse_height": {
            "lambda_limit": (b * inv_ssq) ** ((4.0 - n) / 2.0),
            "height_limits": (np.sqrt(b * inv_ssq) * mu).tolist(),
        },
    }

    notes = []
    if kernel is not None:
        dists = np.array([kernel.boundary_distance(p) for p in pts])
        if np.min(heights * dists) < SMALLNESS_HEIGHT_DIST:
            notes.append("asymptotics unreliable: min height*boundary-distance "
                         f"= {float(np.min(heights * dists)):.3g} < {SMALLNESS_HEIGHT_DIST}")
    overlap = _max_overlap(ctx, pts, heights)
    if overlap > OVERLAP_LEVEL:
        notes.append(f"asymptotics unreliable: spike overlap level {overlap:.3g}")

    return PredictionRecord(rho, lam, pts.copy(), heights, mu.copy(), energy,
                            (res_rate, res_mass), conventions, notes)


def _max_overlap(ctx, points, heights) -> float:
    """Largest cross-spike bubble ratio at a spike center."""
    k = points.shape[0]
    worst = 0.0
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            pi = BubbleParams(points[i], heights[i])
            own = ctx.c_n * heights[j] ** ctx.p_exp
            worst = max(worst, float(bubble_eval(ctx, pi, points[j])) / own)
    return worst


def assemble_approximation(ctx: DimensionContext, kernel,
                           prediction: PredictionRecord) -> Field:
    """Sum of leading-order projected bubbles at the predicted parameters.

    The remainder of the true solution beyond this profile is only norm-
    bounded, never constructed.
    """
    parts = [projected_bubble_field(ctx, kernel, BubbleParams(p, h))
             for p, h in zip(prediction.spike_points, prediction.spike_heights)]

    def value(y):
        return sum(f.value(y) for f in parts)

    def grad(y):
        return sum(f.gradient(y) for f in parts)

    def lap(y):
        return sum(f.laplacian(y) for f in parts)

    return Field(value, grad, lap, label=f"approximation(rho={prediction.rho:g})")


def _spike_spec(spec: QuadratureSpec, prediction: PredictionRecord) -> QuadratureSpec:
    return spec.with_(method="spike-importance",
                      importance_centers=prediction.spike_points,
                      importance_scales=prediction.spike_heights)


def mass_of_approximation(ctx: DimensionContext, kernel, prediction: PredictionRecord,
                          spec: QuadratureSpec) -> QuadratureResult:
    """Monte Carlo mass of the assembled profile; contract: close to rho."""
    u = assemble_approximation(ctx, kernel, prediction)
    result = integrate_ball(lambda y: np.asarray(u.value(y)) ** 2,
                            kernel.center, kernel.radius,
                            _spike_spec(spec, prediction))
    prediction.mass_check = result
    return result


def energy_of_approximation(ctx: DimensionContext, kernel, prediction: PredictionRecord,
                            spec: QuadratureSpec, localization_radius: float = 0.2):
    """Monte Carlo Dirichlet energy, plus per-spike localization fractions.

    The energy concentrates at k * sobolev_level as rho -> 0; localization
    fractions report the share of the integral carried by balls of the given
    radius around each spike.
    """
    u = assemble_approximation(ctx, kernel, prediction)

    def dens(y):
        g = u.gradient(y)
        return np.sum(np.asarray(g) ** 2, axis=-1)

    result = integrate_ball(dens, kernel.center, kernel.radius,
                            _spike_spec(spec, prediction))
    fractions = []
    for p in prediction.spike_points:
        def local_dens(y, p=p):
            inside = np.sum((y - p) ** 2, axis=-1) <= localization_radius**2
            return dens(y) * inside
        local = integrate_ball(local_dens, kernel.center, kernel.radius,
                               _spike_spec(spec, prediction))
        fractions.append(local.value / result.value if result.value else 0.0)
    prediction.energy_check = result
    prediction.localization = np.array(fractions)
    return result, np.array(fractions)
