"""Small shared numerics: wedge products, the gauge field, norms, line fits."""

from __future__ import annotations

import numpy as np


def wedge(u, v) -> np.ndarray | float:
    """2D wedge product u1*v2 - u2*v1, broadcasting over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def vector_potential(x) -> np.ndarray:
    """Symmetric-gauge vector potential A(x) = (-x2, x1)/2.

    Oriented so that curl(b*A) = +b e3: a positive coupling means a magnetic
    field pointing out of the plane.  Flipping this sign conjugates every
    phase downstream and flips the sign of all Hall indices.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    out[..., 0] = -0.5 * x[..., 1]
    out[..., 1] = 0.5 * x[..., 0]
    return out


def hermitian_norm_bound(a: np.ndarray) -> float:
    """Holmgren-Schur-Young bound on the operator norm.

    Returns max of the (inf,1) and (1,inf) norms, i.e. the largest absolute
    row / column sum.  An upper bound on the spectral norm for any matrix,
    and cheap enough to run on every build.
    """
    a = np.asarray(a)
    row = np.abs(a).sum(axis=1).max() if a.size else 0.0
    col = np.abs(a).sum(axis=0).max() if a.size else 0.0
    return float(max(row, col))


def linear_fit(x, y) -> tuple[float, float, float]:
    """Least-squares line y ~ slope*x + intercept; returns (slope, intercept, r2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points to fit a line")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), float(intercept), r2


def assert_hermitian(a: np.ndarray, tol: float = 1e-12, scale: float | None = None) -> None:
    a = np.asarray(a)
    s = scale if scale is not None else max(1.0, float(np.abs(a).max()) if a.size else 1.0)
    dev = float(np.abs(a - a.conj().T).max()) if a.size else 0.0
    if dev > tol * s:
        raise AssertionError(f"matrix is not Hermitian: max deviation {dev:.3e} > {tol:.1e}*{s:.3e}")
