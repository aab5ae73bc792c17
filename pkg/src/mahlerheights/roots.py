"""Certified complex roots of integer polynomials.

The root multiset of the defining polynomial is the raw material for every
archimedean integral in this package: the empirical measure of a point is
the uniform average over these roots.

Pipeline: exact square-free decomposition (Yun) so multiplicities are
exact integers, simultaneous Aberth-Ehrlich iteration per square-free
factor (compiled kernel when available), one extended-precision Newton
polish, then a posteriori certification through scaled residuals and
Newton-based inclusion radii evaluated at the reported double-precision
values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import _kernels
from .poly import IntPoly

# Double-precision unit roundoff; used when folding the float64 downcast
# into certified radii.
_EPS64 = float(np.finfo(np.float64).eps)


class RootFindingError(RuntimeError):
    """Base class for reported (never silent) root-finding failures."""


class NonConvergence(RootFindingError):
    pass


class DerivativeVanished(RootFindingError):
    pass


@dataclass(frozen=True)
class RootSet:
    """All complex roots of an integer polynomial, with certificates.

    ``roots`` holds (value, multiplicity) pairs, multiplicities summing to
    the degree.  ``residual_bound`` is the largest scaled residual
    |P(root)| / sum_k |c_k| |root|^k over the reported values;
    ``radius_bound`` the largest certified inclusion radius.
    """

    roots: tuple
    leading_coeff: int
    residual_bound: float
    radius_bound: float
    iterations: int

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots)

    def values(self, with_multiplicity: bool = True):
        """Root values as a numpy array, repeated per multiplicity when
        requested."""
        if with_multiplicity:
            return np.array(
                [v for v, m in self.roots for _ in range(m)], dtype=complex
            )
        return np.array([v for v, _ in self.roots], dtype=complex)


# ---------------------------------------------------------------------------
# exact square-free machinery
# ---------------------------------------------------------------------------

# Mersenne primes used by the fast square-freeness check; if P mod p is
# square-free for a usable p (p not dividing the leading coefficient) then P
# is square-free over the rationals, and the exact decomposition is skipped.
_CHECK_PRIMES = (2147483647, 2305843009213693951)


def _derivative_coeffs(c):
    return [k * c[k] for k in range(1, len(c))]


def _squarefree_mod(c, p):
    """True if c mod p is square-free; None when the prime is unusable."""
    a = [x % p for x in c]
    while a and a[-1] == 0:
        a.pop()
    if len(a) != len(c):  # leading coefficient vanished mod p
        return None
    b = [k * c[k] % p for k in range(1, len(c))]
    while b and b[-1] == 0:
        b.pop()
    if not b:
        return None  # derivative degenerate mod p, cannot conclude
    while b:
        inv = pow(b[-1], p - 2, p)
        while len(a) >= len(b):
            factor = a[-1] * inv % p
            shift = len(a) - len(b)
            for i, bi in enumerate(b):
                a[shift + i] = (a[shift + i] - factor * bi) % p
            while a and a[-1] == 0:
                a.pop()
            if not a:
                break
        a, b = b, a
    return len(a) == 1


def _content(c):
    g = 0
    for x in c:
        g = gcd(g, abs(x))
    return g


def _primitive(c):
    g = _content(c)
    out = [x // g for x in c]
    if out[-1] < 0:
        out = [-x for x in out]
    return out


def _gcd_primitive(a, b):
    """Primitive gcd of integer coefficient lists (positive leading
    coefficient), by a primitive polynomial remainder sequence."""
    a = _primitive(a)
    b = _primitive(b)
    if len(a) < len(b):
        a, b = b, a
    while True:
        if len(b) == 1:
            return [1]
        r = list(a)
        lb = b[-1]
        while len(r) >= len(b):
            lr = r[-1]
            r = [x * lb for x in r]
            shift = len(r) - len(b)
            for i, bi in enumerate(b):
                r[shift + i] -= lr * bi
            del r[-1]
            while r and r[-1] == 0:
                r.pop()
            if not r:
                return b
            g = _content(r)
            r = [x // g for x in r]
        a, b = b, _primitive(r)


def polynomial_gcd(A: IntPoly, B: IntPoly) -> IntPoly:
    """Greatest common divisor over the rationals, returned as a primitive
    integer polynomial with positive leading coefficient.  A nonconstant
    result certifies a shared root in the algebraic closure."""
    if A.is_zero() and B.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if A.is_zero() or B.is_zero():
        survivor = B if A.is_zero() else A
        return IntPoly(_primitive(list(survivor.coeffs)))
    return IntPoly(_gcd_primitive(list(A.coeffs), list(B.coeffs)))


def _exact_div(a, b):
    """Quotient of integer coefficient lists; the division must be exact."""
    num = [Fraction(x) for x in a]
    out = [Fraction(0)] * (len(a) - len(b) + 1)
    lb = Fraction(b[-1])
    for k in range(len(out) - 1, -1, -1):
        q = num[k + len(b) - 1] / lb
        out[k] = q
        for i, bi in enumerate(b):
            num[k + i] -= q * bi
    if any(x != 0 for x in num):
        raise ArithmeticError("inexact polynomial division")
    if any(x.denominator != 1 for x in out):
        raise ArithmeticError("non-integral quotient")
    return [int(x) for x in out]


def square_free_decomposition(P: IntPoly):
    """Yun decomposition of a primitive polynomial: list of
    (factor: IntPoly, multiplicity) with pairwise coprime square-free
    factors whose weighted product recovers P up to sign.

    A cheap modular check short-circuits the common square-free case.
    """
    c = _primitive(list(P.coeffs))
    if len(c) <= 2:
        return [(IntPoly(c), 1)]
    for p in _CHECK_PRIMES:
        verdict = _squarefree_mod(c, p)
        if verdict:
            return [(IntPoly(c), 1)]
        if verdict is False:
            break
    dc = _derivative_coeffs(c)
    g = _gcd_primitive(c, dc)
    if len(g) == 1:
        return [(IntPoly(c), 1)]
    out = []
    w = _exact_div(c, g)
    y = _exact_div(dc, g)
    z = [yi - wi for yi, wi in zip(y, _derivative_coeffs(w) + [0] * len(y))]
    while len(z) > len(y):
        z.pop()
    z = _trim(z)
    i = 1
    while len(w) > 1:
        gi = _gcd_primitive(w, z) if z else list(w)
        if len(gi) > 1:
            out.append((IntPoly(gi), i))
        w = _exact_div(w, gi)
        y = _exact_div(z, gi)
        dw = _derivative_coeffs(w)
        z = _trim([a - b for a, b in _zip_pad(y, dw)])
        i += 1
    return out


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _zip_pad(a, b):
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return zip(a, b)


# ---------------------------------------------------------------------------
# numeric stage
# ---------------------------------------------------------------------------


def _longdouble_int(n: int) -> np.longdouble:
    """Convert an arbitrary int to extended precision without the float64
    detour (exact for magnitudes within the 64-bit mantissa)."""
    if -(2**53) < n < 2**53:
        return np.longdouble(n)
    sign = -1 if n < 0 else 1
    n = abs(n)
    limbs = []
    while n:
        limbs.append(n & 0xFFFFFFFF)
        n >>= 32
    acc = np.longdouble(0)
    base = np.longdouble(1 << 32)
    for limb in reversed(limbs):
        acc = acc * base + np.longdouble(limb)
    return sign * acc


def _float_coeffs(coeffs):
    """float64 images of the coefficients, uniformly rescaled when they
    would overflow (roots are invariant under uniform scaling)."""
    bits = max(abs(c).bit_length() for c in coeffs if c)
    shift = max(0, bits - 900)
    if shift == 0:
        return [float(c) for c in coeffs]
    scale = 1 << shift
    return [float(Fraction(c, scale)) for c in coeffs]


def _fujiwara_radius(c):
    """Upper bound on root moduli from float coefficients (ascending,
    nonzero constant and leading entries)."""
    d = len(c) - 1
    lead = abs(c[d])
    best = 0.0
    for k in range(d):
        mag = abs(c[k]) / lead
        if k == 0:
            mag /= 2.0
        if mag > 0.0:
            best = max(best, mag ** (1.0 / (d - k)))
    return 2.0 * best


def _initial_circle(cf, d, angle_offset=0.4):
    radius = 0.7 * _fujiwara_radius(cf)
    angles = 2.0 * np.pi * (np.arange(d) + 0.25) / d + angle_offset
    return radius * np.exp(1j * angles)


def _polish(coeffs, z):
    """Three extended-precision Newton sweeps on all points at once."""
    cl = np.array([_longdouble_int(c) for c in coeffs], dtype=np.longdouble)
    zz = z.astype(np.clongdouble)
    for _ in range(3):
        p = np.full(zz.shape, cl[-1], dtype=np.clongdouble)
        dp = np.zeros(zz.shape, dtype=np.clongdouble)
        for k in range(len(cl) - 2, -1, -1):
            dp = dp * zz + p
            p = p * zz + cl[k]
        safe = dp != 0
        step = np.where(safe, p / np.where(safe, dp, 1), 0)
        zz = zz - step
    return zz


def _certify(coeffs, z64):
    """Scaled residuals and Newton inclusion radii at the reported
    double-precision points, evaluated in extended precision."""
    cl = np.array([_longdouble_int(c) for c in coeffs], dtype=np.longdouble)
    zz = z64.astype(np.clongdouble)
    d = len(cl) - 1
    p = np.full(zz.shape, cl[-1], dtype=np.clongdouble)
    dp = np.zeros(zz.shape, dtype=np.clongdouble)
    az = np.abs(zz).astype(np.longdouble)
    scale = np.full(az.shape, np.abs(cl[-1]), dtype=np.longdouble)
    for k in range(d - 1, -1, -1):
        dp = dp * zz + p
        p = p * zz + cl[k]
        scale = scale * az + np.abs(cl[k])
    residuals = (np.abs(p) / scale).astype(float)
    with np.errstate(all="ignore"):
        radii = d * np.abs(p) / np.abs(dp)
    radii = np.where(np.isfinite(radii), radii, np.inf).astype(float)
    radii = radii + _EPS64 * (1.0 + np.abs(z64))
    return residuals, radii


def _merge_clusters(z64, radii):
    """Group numerically inseparable points: union by the 4x-radius
    overlap rule, represent each group by its centroid."""
    n = len(z64)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z64[i] - z64[j]) < 4.0 * max(radii[i], radii[j]):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    merged = []
    for members in groups.values():
        center = complex(np.mean([z64[i] for i in members]))
        merged.append((center, len(members)))
    return merged


def _roots_squarefree(fac: IntPoly, target_residual, max_iters):
    """Roots of one square-free primitive factor: iterate, polish,
    certify."""
    d = fac.degree
    cf = _float_coeffs(fac.coeffs)
    if d == 1:
        z64 = np.array([complex(float(Fraction(-fac.coeffs[0], fac.coeffs[1])))])
        iterations = 0
    else:
        z0 = _initial_circle(cf, d)
        z, iterations, converged = _kernels.aberth_iterate(cf, z0, max_iters, 1e-13)
        if not converged:
            # one deterministic restart from a rotated circle
            z0 = _initial_circle(cf, d, angle_offset=1.3)
            z, extra, converged = _kernels.aberth_iterate(
                cf, z0, 2 * max_iters, 1e-13
            )
            iterations += extra
            if not converged:
                raise NonConvergence(
                    f"root iteration did not converge within {iterations} sweeps "
                    f"for degree {d}"
                )
        z64 = np.asarray(_polish(fac.coeffs, z)).astype(complex)
    residuals, radii = _certify(fac.coeffs, z64)
    worst = float(np.max(residuals))
    if worst > target_residual:
        raise NonConvergence(
            f"achieved scaled residual {worst:.3e} exceeds the requested "
            f"{target_residual:.3e} (degree {d})"
        )
    return z64, residuals, radii, iterations


def find_roots(P: IntPoly, target_residual: float = 1e-12,
               max_iters: int = 400) -> RootSet:
    """All complex roots of P with exact multiplicities and certificates.

    Raises NonConvergence (never returns silently wrong data) when the
    iteration stalls or the certification target cannot be met.
    """
    if P.is_zero():
        raise ValueError("cannot find roots of the zero polynomial")
    if P.degree < 1:
        raise ValueError("constant polynomial has no roots")
    work = P.primitive_part()
    if work.leading_coefficient < 0:
        work = -work
    zero_mult = next(i for i, c in enumerate(work.coeffs) if c != 0)
    collected = []
    if zero_mult:
        collected.append((0j, zero_mult))
        work = IntPoly(work.coeffs[zero_mult:])
    residual_bound = 0.0
    radius_bound = 0.0
    iterations = 0
    if work.degree >= 1:
        for fac, mult in square_free_decomposition(work):
            if fac.degree < 1:
                continue
            z64, residuals, radii, used = _roots_squarefree(
                fac, target_residual, max_iters
            )
            iterations += used
            residual_bound = max(residual_bound, float(np.max(residuals)))
            radius_bound = max(radius_bound, float(np.max(radii)))
            for value, count in _merge_clusters(z64, radii):
                collected.append((value, count * mult))
    collected.sort(key=lambda item: (item[0].real, item[0].imag))
    return RootSet(
        roots=tuple(collected),
        leading_coeff=P.leading_coefficient,
        residual_bound=residual_bound,
        radius_bound=radius_bound,
        iterations=iterations,
    )


def refine_root(P: IntPoly, approx: complex, steps: int = 60) -> complex:
    """Newton refinement of one approximate root at extended precision.

    Raises DerivativeVanished when an iterate kills the derivative and
    NonConvergence when the contraction stays linear (the signature of a
    root cluster; callers should fall back to cluster handling).
    """
    if P.degree < 1:
        raise ValueError("constant polynomial has no roots")
    cl = np.array([_longdouble_int(c) for c in P.coeffs], dtype=np.longdouble)
    z = np.clongdouble(complex(approx))
    tol = np.longdouble(1e-17)
    prev_step = None
    linear_streak = 0
    for _ in range(steps):
        p = np.clongdouble(cl[-1])
        dp = np.clongdouble(0)
        for k in range(len(cl) - 2, -1, -1):
            dp = dp * z + p
            p = p * z + cl[k]
        if dp == 0:
            if p == 0:
                return complex(z)  # exact multiple root hit dead on
            raise DerivativeVanished(
                f"derivative vanishes at iterate {complex(z)}"
            )
        step = p / dp
        z = z - step
        size = abs(step)
        if prev_step is not None and prev_step > 0:
            ratio = float(size / prev_step)
            if 0.25 <= ratio <= 0.97:
                linear_streak += 1
                if linear_streak >= 12:
                    mult = max(2, round(1.0 / (1.0 - ratio)))
                    raise NonConvergence(
                        f"persistent linear contraction (ratio {ratio:.2f}) "
                        f"near {complex(z)}: suspected root cluster of "
                        f"multiplicity about {mult}"
                    )
            else:
                linear_streak = 0
        prev_step = size
        if size <= tol * (1 + abs(z)):
            return complex(z)
    raise NonConvergence(
        f"no convergence after {steps} refinement steps from {complex(approx)}"
    )
