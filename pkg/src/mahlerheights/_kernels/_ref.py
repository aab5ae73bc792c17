"""Reference numerical kernels (numpy).

Semantics here define the kernel contract; the compiled backend in
``_core.pyx`` must agree with these functions to within roundoff.  The
root iteration is a Jacobi-style simultaneous update (all corrections
computed from the previous sweep), which keeps the whole kernel
vectorized.
"""

from __future__ import annotations

from math import fsum

import numpy as np


def _newton_ratio(c, z, d):
    """P(z)/P'(z) for all z, overflow-safe.

    |z| <= 1 uses direct Horner; |z| > 1 evaluates the reversed polynomial
    R(u) = u^d P(1/u) at u = 1/z, where P/P' = z R / (d R - u R').
    """
    out = np.empty_like(z)
    small = np.abs(z) <= 1.0
    if small.any():
        zs = z[small]
        p = np.full(zs.shape, c[d])
        dp = np.zeros(zs.shape, dtype=np.complex128)
        for k in range(d - 1, -1, -1):
            dp = dp * zs + p
            p = p * zs + c[k]
        with np.errstate(all="ignore"):
            out[small] = p / dp
    large = ~small
    if large.any():
        u = 1.0 / z[large]
        r = np.full(u.shape, c[0])
        dr = np.zeros(u.shape, dtype=np.complex128)
        for k in range(1, d + 1):
            dr = dr * u + r
            r = r * u + c[k]
        with np.errstate(all="ignore"):
            out[large] = z[large] * r / (d * r - u * dr)
    return out


def aberth_iterate(coeffs, z0, max_iters, tol):
    """Simultaneous root iteration from the starting points z0.

    Returns (roots, iterations_used, converged); converged means the last
    sweep's largest relative correction fell below tol.  Deterministic:
    nonfinite corrections fall back to the plain Newton step, and a
    vanishing derivative produces a fixed small displacement.
    """
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    z = np.array(z0, dtype=np.complex128)
    d = c.size - 1
    iters = 0
    for iters in range(1, max_iters + 1):
        w = _newton_ratio(c, z, d)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        with np.errstate(all="ignore"):
            corr = w / (1.0 - w * s)
        corr = np.where(np.isfinite(corr), corr, w)
        bad = ~np.isfinite(corr)
        if bad.any():
            corr = corr.copy()
            corr[bad] = (1e-3 + 2e-3j) * (1.0 + np.abs(z[bad]))
        z = z - corr
        if np.max(np.abs(corr) / (1.0 + np.abs(z))) < tol:
            return z, iters, True
    return z, iters, False


def polyval_points(coeffs, points):
    """Horner evaluation at many points; intended for |point| of order 1
    (quadrature nodes), no overflow protection."""
    c = np.asarray(coeffs, dtype=np.complex128)
    z = np.asarray(points, dtype=np.complex128)
    acc = np.full(z.shape, c[-1])
    for k in range(c.size - 2, -1, -1):
        acc = acc * z + c[k]
    return acc


def log_abs_sum(values, floor):
    """Sum of log|v| over entries with |v| >= floor, plus the dropped count.

    Exactly rounded (math.fsum), so the reduction order cannot matter.
    """
    a = np.abs(np.asarray(values, dtype=np.complex128)).ravel()
    keep = a >= floor
    dropped = int(a.size) - int(keep.sum())
    kept = a[keep]
    if kept.size == 0:
        return 0.0, dropped
    return fsum(np.log(kept).tolist()), dropped
