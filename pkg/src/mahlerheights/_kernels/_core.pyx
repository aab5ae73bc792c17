# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Same contract as ``_ref``; see that module for the semantics.  The root
iteration here is Gauss-Seidel style (each root update sees the roots
already updated in the current sweep), which typically converges in fewer
sweeps than the vectorized Jacobi reference; both stop on the same
relative-correction criterion and feed the same polishing stage.
"""

import numpy as np

from libc.math cimport fabs, isfinite, log, sqrt


cdef inline double _cabs(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef inline double complex _newton_ratio(const double complex[::1] c,
                                         double complex z, Py_ssize_t d) nogil:
    cdef double complex p, dp, u, r, dr
    cdef Py_ssize_t k
    if _cabs(z) <= 1.0:
        p = c[d]
        dp = 0
        for k in range(d - 1, -1, -1):
            dp = dp * z + p
            p = p * z + c[k]
        return p / dp
    u = 1.0 / z
    r = c[0]
    dr = 0
    for k in range(1, d + 1):
        dr = dr * u + r
        r = r * u + c[k]
    return z * r / (d * r - u * dr)


def aberth_iterate(coeffs, z0, int max_iters, double tol):
    """Simultaneous root iteration; returns (roots, iterations, converged)."""
    c_arr = np.ascontiguousarray(coeffs, dtype=np.complex128)
    z_arr = np.array(z0, dtype=np.complex128)
    cdef const double complex[::1] c = c_arr
    cdef double complex[::1] z = z_arr
    cdef Py_ssize_t d = c.shape[0] - 1
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t i, j
    cdef int it
    cdef double worst, rel
    cdef double complex w, s, corr, denom
    for it in range(1, max_iters + 1):
        worst = 0.0
        for i in range(n):
            w = _newton_ratio(c, z[i], d)
            if not (isfinite(w.real) and isfinite(w.imag)):
                corr = (1e-3 + 2e-3j) * (1.0 + _cabs(z[i]))
            else:
                s = 0
                for j in range(n):
                    if j != i:
                        s = s + 1.0 / (z[i] - z[j])
                denom = 1.0 - w * s
                corr = w / denom
                if not (isfinite(corr.real) and isfinite(corr.imag)):
                    corr = w
            z[i] = z[i] - corr
            rel = _cabs(corr) / (1.0 + _cabs(z[i]))
            if rel > worst:
                worst = rel
        if worst < tol:
            return z_arr, it, True
    return z_arr, max_iters, False


def polyval_points(coeffs, points):
    """Horner evaluation at many points (no overflow protection)."""
    c_arr = np.ascontiguousarray(coeffs, dtype=np.complex128)
    z_arr = np.ascontiguousarray(points, dtype=np.complex128).ravel()
    out_arr = np.empty_like(z_arr)
    cdef const double complex[::1] c = c_arr
    cdef const double complex[::1] z = z_arr
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t d = c.shape[0] - 1
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t i, k
    cdef double complex acc, zi
    for i in range(n):
        zi = z[i]
        acc = c[d]
        for k in range(d - 1, -1, -1):
            acc = acc * zi + c[k]
        out[i] = acc
    return out_arr.reshape(np.shape(points))


def log_abs_sum(values, double floor):
    """Neumaier-compensated sum of log|v| over |v| >= floor, plus dropped
    count; fixed order, deterministic."""
    v_arr = np.ascontiguousarray(values, dtype=np.complex128).ravel()
    cdef const double complex[::1] v = v_arr
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i, dropped = 0
    cdef double total = 0.0, comp = 0.0, a, x, t
    for i in range(n):
        a = _cabs(v[i])
        if a < floor:
            dropped += 1
            continue
        x = log(a)
        t = total + x
        if fabs(total) >= fabs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        total = t
    return total + comp, dropped
