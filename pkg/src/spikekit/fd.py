"""Central finite-difference harness used as fallback and as test oracle.

Step policy: first derivatives use h = max(base, base*|y|) with
base = 1e-5, balancing truncation against cancellation at double precision.
Second derivatives (Laplacians, Hessians) use a larger base step 1e-3 since
the optimal step for second differences scales like eps^{1/4}.
"""

import numpy as np

FIRST_ORDER_STEP = 1e-5
SECOND_ORDER_STEP = 1e-3


def _step(y, base):
    scale = np.linalg.norm(np.asarray(y, dtype=float).reshape(-1))
    return max(base, base * scale)


def gradient(f, y, h: float | None = None) -> np.ndarray:
    """Central-difference gradient of a scalar field at one point or batch."""
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    pts = y[None, :] if single else y
    h = h if h is not None else _step(pts[0], FIRST_ORDER_STEP)
    n = pts.shape[1]
    g = np.empty_like(pts)
    for a in range(n):
        e = np.zeros(n)
        e[a] = h
        g[:, a] = (np.asarray(f(pts + e)) - np.asarray(f(pts - e))) / (2.0 * h)
    return g[0] if single else g


def laplacian(f, y, h: float | None = None) -> np.ndarray | float:
    """Second-order central-difference Laplacian."""
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    pts = y[None, :] if single else y
    h = h if h is not None else _step(pts[0], SECOND_ORDER_STEP)
    n = pts.shape[1]
    center = np.asarray(f(pts), dtype=float)
    acc = np.zeros(pts.shape[0])
    for a in range(n):
        e = np.zeros(n)
        e[a] = h
        acc += np.asarray(f(pts + e)) + np.asarray(f(pts - e)) - 2.0 * center
    out = acc / (h * h)
    return float(out[0]) if single else out


def hessian(f, y, h: float | None = None) -> np.ndarray:
    """Central-difference Hessian of a scalar function of a flat vector."""
    y = np.asarray(y, dtype=float)
    h = h if h is not None else _step(y, SECOND_ORDER_STEP)
    n = y.shape[0]
    out = np.empty((n, n))
    for a in range(n):
        for b in range(a, n):
            ea = np.zeros(n); ea[a] = h
            eb = np.zeros(n); eb[b] = h
            val = (f(y + ea + eb) - f(y + ea - eb) - f(y - ea + eb) + f(y - ea - eb)) / (4.0 * h * h)
            out[a, b] = out[b, a] = val
    return out


def jacobian(f, y, h: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of a vector-valued function."""
    y = np.asarray(y, dtype=float)
    h = h if h is not None else _step(y, FIRST_ORDER_STEP)
    n = y.shape[0]
    cols = []
    for a in range(n):
        e = np.zeros(n)
        e[a] = h
        cols.append((np.asarray(f(y + e)) - np.asarray(f(y - e))) / (2.0 * h))
    return np.stack(cols, axis=-1)
