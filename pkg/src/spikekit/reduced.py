"""The reduced spike-interaction functional and its critical points.

For k interior spike locations a_1..a_k with limit heights mu_1..mu_k the
functional reads

    Psi(a, mu) = < M(a) mu^{(N-2)/2}, mu^{(N-2)/2} > A^2  -  |mu|^2 B,

where the interaction matrix M has the Robin function on the diagonal and
minus the Green's function off it,

    M_jj = R(a_j),     M_jl = -G(a_j, a_l)   (j != l),

and A, B are the bubble constants of ``bubble.DimensionContext``.
Nondegenerate critical points of Psi with M positive definite are the
configurations around which the normalized multi-spike machinery operates;
this module finds them (damped Newton with a boundary barrier), classifies
them (Hessian spectrum, M positivity) and enumerates them by seeded
multistart with permutation-aware deduplication.

Coordinate layout: the flat variable z stacks all point coordinates first
(row-major over spikes) and then the k heights, so len(z) = (N+1) k.

At any critical point, pairing the height-gradient equation with mu gives
the closed energy law  Psi* = -((N-4)/(N-2)) B |mu|^2,  which the tests
assert for every record.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bubble import DimensionContext
from .rng import stream

DEGENERACY_TOL = 1e-6
DEDUP_POINT_REL = 1e-5
DEDUP_HEIGHT_REL = 1e-5
BOUNDARY_MARGIN_REL = 1e-3
HEIGHT_FLOOR = 1e-8


@dataclass(frozen=True)
class SpikeConfiguration:
    """k spike locations (k, n) and positive limit heights (k,)."""

    points: np.ndarray
    heights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        hts = np.atleast_1d(np.asarray(self.heights, dtype=float))
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "heights", hts)
        if pts.shape[0] != hts.shape[0]:
            raise ValueError("one height per spike point is required")
        if np.any(hts <= 0):
            raise ValueError("spike heights must be positive")
        k = pts.shape[0]
        for i in range(k):
            for j in range(i + 1, k):
                if np.linalg.norm(pts[i] - pts[j]) == 0.0:
                    raise ValueError("spike points must be pairwise distinct")

    @property
    def k(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.points.reshape(-1), self.heights])

    @staticmethod
    def unflatten(z: np.ndarray, k: int, n: int) -> "SpikeConfiguration":
        z = np.asarray(z, dtype=float)
        return SpikeConfiguration(z[: k * n].reshape(k, n), z[k * n:])

    def canonical(self) -> "SpikeConfiguration":
        """Spikes sorted lexicographically by coordinates."""
        order = np.lexsort(self.points.T[::-1])
        return SpikeConfiguration(self.points[order], self.heights[order])


@dataclass
class CriticalPointRecord:
    configuration: SpikeConfiguration
    psi_value: float
    grad_norm: float
    iterations: int
    hessian_spectrum: np.ndarray | None = None
    interaction_eigenvalues: np.ndarray | None = None
    nondegenerate: bool | None = None
    m_positive: bool | None = None
    flags: list = field(default_factory=list)

    converged = True


@dataclass
class NonConvergenceReport:
    reason: str
    configuration: SpikeConfiguration
    grad_norm: float
    iterations: int
    flags: list = field(default_factory=list)

    converged = False


def interaction_matrix(kernel, points) -> np.ndarray:
    """Robin diagonal, minus-Green off-diagonal; symmetric by construction."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    k = pts.shape[0]
    m = np.empty((k, k))
    for i in range(k):
        m[i, i] = kernel.robin(pts[i])
        for j in range(i + 1, k):
            g = kernel.green(pts[i], pts[j])
            m[i, j] = m[j, i] = -g
    return m


def psi_eval(ctx: DimensionContext, kernel, config: SpikeConfiguration) -> float:
    m = interaction_matrix(kernel, config.points)
    mup = config.heights ** ctx.p_exp
    return float(mup @ m @ mup * ctx.a_const**2 - config.heights @ config.heights * ctx.b_const)


def psi_gradient(ctx: DimensionContext, kernel, config: SpikeConfiguration) -> np.ndarray:
    """Analytic gradient in the flat (points, heights) layout."""
    k, n = config.k, config.n
    p = ctx.p_exp
    a2 = ctx.a_const**2
    pts, mu = config.points, config.heights
    mup = mu**p
    m = interaction_matrix(kernel, pts)

    grad_pts = np.zeros((k, n))
    for j in range(k):
        grad_pts[j] = kernel.robin_grad(pts[j]) * mup[j] ** 2
        for l in range(k):
            if l == j:
                continue
            grad_pts[j] -= 2.0 * mup[j] * mup[l] * kernel.green_grad1(pts[j], pts[l])
    grad_pts *= a2

    grad_mu = 2.0 * p * a2 * mu ** (p - 1.0) * (m @ mup) - 2.0 * ctx.b_const * mu
    return np.concatenate([grad_pts.reshape(-1), grad_mu])


def psi_hessian(ctx: DimensionContext, kernel, config: SpikeConfiguration) -> np.ndarray:
    k, n = config.k, config.n
    p = ctx.p_exp
    a2 = ctx.a_const**2
    pts, mu = config.points, config.heights
    mup = mu**p
    m = interaction_matrix(kernel, pts)
    dim = k * (n + 1)
    hess = np.zeros((dim, dim))

    def pt_slice(j):
        return slice(j * n, (j + 1) * n)

    # point-point blocks
    for j in range(k):
        block = kernel.robin_hess(pts[j]) * mup[j] ** 2
        for l in range(k):
            if l == j:
                continue
            block -= 2.0 * mup[j] * mup[l] * kernel.green_hess11(pts[j], pts[l])
        hess[pt_slice(j), pt_slice(j)] = a2 * block
        for l in range(j + 1, k):
            cross = -2.0 * mup[j] * mup[l] * kernel.green_hess12(pts[j], pts[l])
            hess[pt_slice(j), pt_slice(l)] = a2 * cross
            hess[pt_slice(l), pt_slice(j)] = a2 * cross.T

    # height-height block
    hmm = np.empty((k, k))
    for jj in range(k):
        off = sum(m[jj, l] * mup[l] for l in range(k) if l != jj)
        hmm[jj, jj] = (2.0 * p * (2.0 * p - 1.0) * m[jj, jj] * mu[jj] ** (2.0 * p - 2.0)
                       + 2.0 * p * (p - 1.0) * mu[jj] ** (p - 2.0) * off) * a2 - 2.0 * ctx.b_const
        for ll in range(k):
            if ll != jj:
                hmm[jj, ll] = 2.0 * p**2 * a2 * mu[jj] ** (p - 1.0) * mu[ll] ** (p - 1.0) * m[jj, ll]
    hess[k * n:, k * n:] = hmm

    # point-height blocks
    for j in range(k):
        for mm in range(k):
            if mm == j:
                col = 2.0 * p * mu[j] ** (2.0 * p - 1.0) * kernel.robin_grad(pts[j])
                for l in range(k):
                    if l == j:
                        continue
                    col -= 2.0 * p * mu[j] ** (p - 1.0) * mup[l] * kernel.green_grad1(pts[j], pts[l])
            else:
                col = -2.0 * p * mup[j] * mu[mm] ** (p - 1.0) * kernel.green_grad1(pts[j], pts[mm])
            hess[pt_slice(j), k * n + mm] = a2 * col
            hess[k * n + mm, pt_slice(j)] = a2 * col
    return hess


# ----------------------------------------------------------------------
# Newton search
# ----------------------------------------------------------------------

MAX_LOG_HEIGHT_STEP = 1.0
MAX_POINT_STEP_REL = 0.125


def find_critical_point(ctx: DimensionContext, kernel, initial: SpikeConfiguration,
                        tol: float = 1e-10, max_iter: int = 200):
    """Damped Newton iteration on grad Psi = 0.

    Heights are iterated in log scale, which respects their dilation role:
    the degenerate collapsed stratum (all heights to zero) sits at infinity
    instead of attracting Newton steps, and positivity is automatic.  Steps
    are capped (point block by a fraction of the domain diameter, log-height
    block by MAX_LOG_HEIGHT_STEP) and backtracked until the gradient norm
    decreases; steps that would push a spike within 1e-3 * diam of the
    boundary or onto another spike are halved.  A singular Hessian falls
    back to a scaled-gradient step (flagged).  Returns a
    CriticalPointRecord on success, otherwise a NonConvergenceReport with
    the last iterate.
    """
    k, n = initial.k, initial.n
    margin = BOUNDARY_MARGIN_REL * kernel.diameter
    flags = []

    def split(z):
        return z[: k * n].reshape(k, n), np.exp(z[k * n:])

    def scaled_system(config, grad):
        # phi = gradient in (points, log heights); J its Jacobian
        mu = config.heights
        phi = grad.copy()
        phi[k * n:] = mu * grad[k * n:]
        hess = psi_hessian(ctx, kernel, config)
        jac = hess.copy()
        jac[: k * n, k * n:] = hess[: k * n, k * n:] * mu
        jac[k * n:, : k * n] = mu[:, None] * hess[k * n:, : k * n]
        jac[k * n:, k * n:] = np.outer(mu, mu) * hess[k * n:, k * n:] + np.diag(phi[k * n:])
        return phi, jac

    grad = psi_gradient(ctx, kernel, initial)
    gnorm = float(np.linalg.norm(grad))
    if gnorm <= tol:
        return CriticalPointRecord(initial, psi_eval(ctx, kernel, initial), gnorm, 0)
    if np.any(initial.heights < HEIGHT_FLOOR):
        return NonConvergenceReport("initial heights below the collapse floor",
                                    initial, gnorm, 0, ["height_floor"])

    z = np.concatenate([initial.points.reshape(-1), np.log(initial.heights)])
    config = initial
    for it in range(1, max_iter + 1):
        phi, jac = scaled_system(config, grad)
        try:
            step = np.linalg.solve(jac, -phi)
            if not np.all(np.isfinite(step)):
                raise np.linalg.LinAlgError("non-finite Newton step")
        except np.linalg.LinAlgError:
            if "singular_hessian" not in flags:
                flags.append("singular_hessian")
            step = -jac.T @ phi
            step /= max(np.linalg.norm(step), 1e-300)
        pt_norm = np.linalg.norm(step[: k * n])
        if pt_norm > MAX_POINT_STEP_REL * kernel.diameter:
            step *= MAX_POINT_STEP_REL * kernel.diameter / pt_norm
        s_norm = np.max(np.abs(step[k * n:])) if k else 0.0
        if s_norm > MAX_LOG_HEIGHT_STEP:
            step *= MAX_LOG_HEIGHT_STEP / s_norm

        accepted = False
        t = 1.0
        for _ in range(40):
            trial = z + t * step
            pts, heights = split(trial)
            ok, why = _admissible(pts, heights, kernel, margin)
            if ok:
                trial_config = SpikeConfiguration(pts, heights)
                trial_grad = psi_gradient(ctx, kernel, trial_config)
                tnorm = float(np.linalg.norm(trial_grad))
                if tnorm < gnorm:
                    z, grad, gnorm, config = trial, trial_grad, tnorm, trial_config
                    accepted = True
                    break
            elif why not in flags:
                flags.append(why)
            t *= 0.5
        if not accepted:
            return NonConvergenceReport("stalled: no admissible descent step",
                                        config, gnorm, it, flags)
        if np.any(config.heights < HEIGHT_FLOOR):
            return NonConvergenceReport("heights collapsed toward zero",
                                        config, gnorm, it, flags + ["height_floor"])
        if gnorm <= tol:
            return CriticalPointRecord(config, psi_eval(ctx, kernel, config),
                                       gnorm, it, flags=flags)

    return NonConvergenceReport(f"no convergence after {max_iter} iterations",
                                config, gnorm, max_iter, flags)


def _admissible(pts, heights, kernel, margin):
    if not np.all(np.isfinite(heights)) or not np.all(np.isfinite(pts)):
        return False, "non_finite"
    k = pts.shape[0]
    for j in range(k):
        if not kernel.contains(pts[j]) or kernel.boundary_distance(pts[j]) < margin:
            return False, "boundary_barrier"
    for i in range(k):
        for j in range(i + 1, k):
            if np.linalg.norm(pts[i] - pts[j]) < margin:
                return False, "spike_collision"
    return True, ""


def classify(ctx: DimensionContext, kernel, record: CriticalPointRecord,
             degeneracy_tol: float = DEGENERACY_TOL) -> CriticalPointRecord:
    """Fill spectrum and flags: nondegeneracy and interaction positivity."""
    hess = psi_hessian(ctx, kernel, record.configuration)
    spectrum = np.linalg.eigvalsh(hess)
    m_eigs = np.linalg.eigvalsh(interaction_matrix(kernel, record.configuration.points))
    record.hessian_spectrum = spectrum
    record.interaction_eigenvalues = m_eigs
    record.nondegenerate = _spectrum_nondegenerate(spectrum, degeneracy_tol)
    record.m_positive = bool(np.all(m_eigs > 0.0))
    return record


def _spectrum_nondegenerate(spectrum, degeneracy_tol=DEGENERACY_TOL) -> bool:
    top = float(np.max(np.abs(spectrum)))
    if top == 0.0:
        return False
    return bool(np.min(np.abs(spectrum)) > degeneracy_tol * top)


def enumerate_critical_points(ctx: DimensionContext, kernel, k: int,
                              starts: int = 64, seed: int = 0,
                              tol: float = 1e-10,
                              height_range=(0.02, 5.0)) -> list:
    """Multistart search for distinct critical points with k spikes.

    Start points are seeded draws: spike locations uniform in the domain
    (kept off the boundary barrier) and heights log-uniform over
    height_range.  Results are deduplicated up to spike permutation and
    sorted by functional value.  An empty list is a valid outcome.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = stream(seed, "multistart", k)
    margin = 2.0 * BOUNDARY_MARGIN_REL * kernel.diameter
    records = []
    for _ in range(starts):
        pts = []
        while len(pts) < k:
            cand = kernel.interior_point(rng)
            if kernel.boundary_distance(cand) < margin:
                continue
            if any(np.linalg.norm(cand - q) < margin for q in pts):
                continue
            pts.append(cand)
        lo, hi = height_range
        heights = np.exp(rng.uniform(math.log(lo), math.log(hi), size=k))
        result = find_critical_point(ctx, kernel, SpikeConfiguration(np.array(pts), heights), tol=tol)
        if not result.converged:
            continue
        if np.any(result.configuration.heights < 10.0 * HEIGHT_FLOOR):
            continue  # collapsed-height stratum, not an interior critical point
        records.append(classify(ctx, kernel, result))
    return _dedup(records, kernel)


# spec name for the enumeration of the critical set
enumerate_Q = enumerate_critical_points


def _dedup(records, kernel) -> list:
    out = []
    point_tol = DEDUP_POINT_REL * kernel.diameter
    for rec in records:
        rec = replace(rec, configuration=rec.configuration.canonical())
        duplicate = False
        for kept in out:
            same_pts = np.max(np.linalg.norm(
                rec.configuration.points - kept.configuration.points, axis=1)) < point_tol
            same_hts = np.max(np.abs(rec.configuration.heights - kept.configuration.heights)
                              / kept.configuration.heights) < DEDUP_HEIGHT_REL
            if same_pts and same_hts:
                duplicate = True
                break
        if not duplicate:
            out.append(rec)
    out.sort(key=lambda r: r.psi_value)
    return out
