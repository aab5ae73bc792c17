"""Global heights assembled from local contributions.

Weil heights of algebraic numbers via the Mahler measure of their
defining polynomial, heights of hypersurfaces via polycircle quadrature,
and canonical heights for the quadratic family f(z) = z^2 + c via
per-place escape rates.

Finite-place data stays exact (rational multiples of log p); only the
archimedean pieces are floating point, so every stated tolerance is an
archimedean one.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import fsum, ldexp, log, log1p, sqrt

from .arch import mahler_from_roots, mahler_quadrature
from .padic import (
    INFINITY,
    IncompletePlaceSet,
    LocalValue,
    PRIME_TRIAL_BOUND,
    _trial_factor,
    ensure_prime,
    vp,
)
from .poly import IntPoly, MultiPoly, RatPoly
from .roots import find_roots


class EscapeRateError(RuntimeError):
    """Escape-rate iteration could not certify escape or boundedness.

    ``partial`` carries the best value reached when the budget ran out.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class HeightBreakdown:
    """A height split by place.

    total = arch + sum of finite entries + unattributed, as a bookkeeping
    identity; ``unattributed`` is nonzero only when prime enumeration hit
    its trial-division limit (then ``places_complete`` is False and the
    leftover logarithmic mass is reported without a prime label).
    """

    arch: float
    finite: tuple
    total: float
    degree: int
    error_estimate: float = 0.0
    places_complete: bool = True
    unattributed: float = 0.0

    def finite_sum(self) -> float:
        return fsum(lv.to_float() for lv in self.finite)


def _factor_or_warn(n: int, what: str):
    """Trial-division prime factorization; returns (primes, cofactor) and
    warns when the cofactor stays unfactored."""
    found, cofactor = _trial_factor(n, PRIME_TRIAL_BOUND)
    if cofactor > 1:
        warnings.warn(
            f"possibly incomplete place set: {what} has unfactored part "
            f"{cofactor}",
            IncompletePlaceSet,
        )
    return sorted(found), cofactor


def weil_height(P: IntPoly, rootset=None) -> HeightBreakdown:
    """Height of the points defined by P: (1/d) log M(P) for primitive P,
    split into the root-modulus part (arch) and one exact term
    (v_p(leading)/d) log p per prime dividing the leading coefficient.

    A precomputed ``rootset`` of the primitive part skips the root find.
    """
    if P.is_zero() or P.degree < 1:
        raise ValueError("need a nonzero polynomial of degree >= 1")
    prim = P.primitive_part()
    if prim.coeffs != P.coeffs:
        warnings.warn("polynomial was not primitive; content dropped")
    d = prim.degree
    lead = abs(prim.leading_coefficient)
    if rootset is None:
        rootset = find_roots(prim)
    elif abs(rootset.leading_coeff) != lead:
        raise ValueError("rootset does not belong to the primitive part")
    arch = (mahler_from_roots(rootset) - log(lead)) / d
    primes, cofactor = _factor_or_warn(lead, "leading coefficient")
    finite = tuple(
        LocalValue(Fraction(vp(lead, p), d), p) for p in primes if vp(lead, p)
    )
    unattributed = log(cofactor) / d if cofactor > 1 else 0.0
    total = arch + fsum(lv.to_float() for lv in finite) + unattributed
    return HeightBreakdown(
        arch=arch,
        finite=finite,
        total=total,
        degree=d,
        places_complete=(cofactor == 1),
        unattributed=unattributed,
    )


def hypersurface_height(F: MultiPoly, grid: int = 4096) -> HeightBreakdown:
    """Height of the hypersurface cut out by a primitive homogeneous F:
    the polycircle Mahler integral.  Every finite place contributes zero
    (the Gauss norm of a primitive polynomial is 1), so the finite list is
    empty and total = arch up to the attached quadrature error."""
    if not isinstance(F, MultiPoly):
        raise TypeError("hypersurface divisor must be a MultiPoly")
    if F.is_zero():
        raise ValueError("zero polynomial")
    if not F.is_homogeneous():
        raise ValueError("F must be homogeneous")
    if F.content() != 1:
        raise ValueError("F must be primitive; divide by the content first")
    quad = mahler_quadrature(F, grid)
    return HeightBreakdown(
        arch=quad.estimate,
        finite=(),
        total=quad.estimate,
        degree=F.total_degree,
        error_estimate=quad.error_estimate,
    )


# ---------------------------------------------------------------------------
# escape rates for f(z) = z^2 + c
# ---------------------------------------------------------------------------


def escape_radius(c) -> float:
    """Radius beyond which orbits of z^2 + c grow monotonically."""
    return (1.0 + sqrt(1.0 + 4.0 * abs(complex(c)))) / 2.0


def _arch_escape(c: complex, x: complex, tol: float, max_iters: int) -> float:
    """lim 2^{-k} log max(1, |f^k(x)|) at the archimedean place.

    Orbits that stay within the escape radius for the whole budget are
    reported as bounded (rate 0); escaped orbits use the geometric tail
    bound to stop as soon as the remainder is below tol.
    """
    R = escape_radius(c)
    z = complex(x)
    k = 0
    while k < max_iters and abs(z) <= R + 1e-9:
        z = z * z + c
        k += 1
    if abs(z) <= R + 1e-9:
        return 0.0  # bounded-orbit certificate (up to the budget)
    while k < max_iters:
        a = abs(z)
        if a > 1e100:
            return ldexp(log(a), -k)  # tail below 2^{-k} |c| / a^2
        # remaining error is at most 2^{-k} * |log(1 - |c|/a^2)|
        tail = -log1p(-abs(c) / (a * a))
        if ldexp(tail, -k) <= tol:
            return ldexp(log(a), -k)
        z = z * z + c
        k += 1
    raise EscapeRateError(
        f"no escape certificate after {max_iters} iterations near the "
        f"escape boundary",
        partial=ldexp(log(max(1.0, abs(z))), -max_iters),
    )


def _finite_bad_rate(c: Fraction, x: Fraction, p: int,
                     max_steps: int = 64) -> LocalValue:
    """Exact escape rate at a prime of bad reduction (v_p(c) < 0) for a
    rational starting point.

    Valuation argument: once 2 v_p(z) < v_p(c) the valuation doubles
    forever, so the rate is -v_p(z) / 2^k at that step, an exact dyadic
    multiple of log p.  An exact orbit repeat certifies boundedness
    (rate 0).  Orbits pinned to the boundary circle v = v_p(c)/2 cannot be
    certified either way and raise.
    """
    vc = vp(c, p)
    z = Fraction(x)
    seen = set()
    boundary_streak = 0
    for k in range(max_steps):
        vz = vp(z, p) if z != 0 else INFINITY
        if vz is not INFINITY and 2 * vz < vc:
            return LocalValue(Fraction(-vz, 2**k), p)
        if 2 * vz == vc:
            boundary_streak += 1
            if boundary_streak >= 12:
                raise EscapeRateError(
                    f"orbit sits on the p-adic boundary circle "
                    f"v_{p} = {vc}/2; boundedness undecidable here",
                    partial=LocalValue(Fraction(0), p),
                )
        else:
            boundary_streak = 0
        if z in seen:
            return LocalValue(Fraction(0), p)  # exact preperiodicity
        seen.add(z)
        if z.numerator.bit_length() + z.denominator.bit_length() > 200000:
            raise EscapeRateError(
                f"orbit values outgrew the exact budget after {k} steps",
                partial=LocalValue(Fraction(0), p),
            )
        z = z * z + c
    raise EscapeRateError(
        f"no p-adic escape certificate after {max_steps} steps",
        partial=LocalValue(Fraction(0), p),
    )


def local_escape_rate(c, x, place, tol: float = 1e-12,
                      max_iters: int = 2000):
    """Local canonical-height density of x for f(z) = z^2 + c.

    place "arch": returns a float, lim 2^{-k} log max(1, |f^k(x)|).
    place p (prime): returns an exact LocalValue; good reduction
    (v_p(c) >= 0) uses the closed form log max(1, |x|_p), bad reduction
    runs the exact valuation recursion (rational x only).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if place == "arch":
        return _arch_escape(complex(Fraction(c) if not isinstance(c, complex)
                                    else c), complex(x), tol, max_iters)
    p = int(place)
    ensure_prime(p)
    c = Fraction(c)
    if isinstance(x, complex):
        raise TypeError("finite places need an exact rational point")
    x = Fraction(x)
    if c == 0 or vp(c, p) >= 0:
        vx = vp(x, p) if x != 0 else INFINITY
        drop = 0 if vx is INFINITY else max(0, -vx)
        return LocalValue(Fraction(drop), p)
    return _finite_bad_rate(c, x, p)


# ---------------------------------------------------------------------------
# canonical height
# ---------------------------------------------------------------------------


def rational_preperiodic(c, x, max_steps: int = 128,
                         bit_budget: int = 4096) -> bool:
    """Exact test: does the orbit of a rational x under z^2 + c repeat?

    Preperiodic orbits consist of height-zero values, so their numerators
    and denominators stay small; any orbit that outgrows the bit budget is
    certainly not preperiodic.
    """
    c = Fraction(c)
    z = Fraction(x)
    seen = set()
    for _ in range(max_steps):
        if z in seen:
            return True
        seen.add(z)
        if z.numerator.bit_length() + z.denominator.bit_length() > bit_budget:
            return False
        z = z * z + c
    return False


def _pushforward_step(P: IntPoly, c: Fraction) -> IntPoly:
    """Primitive polynomial whose roots are f(alpha) = alpha^2 + c over
    the roots alpha of P (with multiplicity).

    P(T) P(-T) is even, equal to +-A(T^2); the result is A shifted by c
    and renormalized.
    """
    flipped = IntPoly(tuple(
        -coef if k % 2 else coef for k, coef in enumerate(P.coeffs)
    ))
    prod = P * flipped
    even = prod.coeffs[::2]
    assert all(c_ == 0 for c_ in prod.coeffs[1::2])
    shifted = RatPoly(tuple(Fraction(e) for e in even)).shift(-c)
    integral, _ = shifted.clear_denominators()
    prim = integral.primitive_part()
    if prim.leading_coefficient < 0:
        prim = -prim
    return prim


def _conjugate_bad_sum(P: IntPoly, c: Fraction, p: int,
                       max_steps: int = 12) -> LocalValue:
    """Sum over the roots of P of the bad-reduction escape rate at p,
    computed exactly through the orbit-level polynomials.

    For primitive P_k (roots = f^k applied to the roots of P) the Gauss
    identity gives sum_i log max(1, |root_i|_p) = v_p(lc(P_k)) log p, so
    the escape-rate sum is lim 2^{-k} v_p(lc(P_k)) log p.  The sequence
    v_p(lc) doubles forever once every root has escaped; two consecutive
    doublings freeze the closed form.  An exact repeat of P_k certifies
    a preperiodic (bounded) conjugate set.
    """
    current = P
    v_prev = vp(current.leading_coefficient, p)
    seen = {current.coeffs}
    doublings = 0
    for k in range(1, max_steps + 1):
        current = _pushforward_step(current, c)
        v_now = vp(current.leading_coefficient, p)
        if v_now == 2 * v_prev and v_now > 0:
            doublings += 1
            if doublings >= 2:
                return LocalValue(Fraction(v_now, 2**k), p)
        else:
            doublings = 0
        if v_now == 0 and current.coeffs in seen:
            return LocalValue(Fraction(0), p)
        seen.add(current.coeffs)
        if sum(abs(co).bit_length() for co in current.coeffs) > 10**6:
            raise EscapeRateError(
                f"conjugate orbit polynomials outgrew the exact budget "
                f"at step {k}",
                partial=LocalValue(Fraction(v_now, 2**k), p),
            )
        v_prev = v_now
    raise EscapeRateError(
        f"no stabilization of the conjugate valuation sequence within "
        f"{max_steps} steps",
        partial=LocalValue(Fraction(v_prev, 2**max_steps), p),
    )


def canonical_height(c, P: IntPoly, tol: float = 1e-12) -> float:
    """Canonical height for f(z) = z^2 + c of the algebraic number with
    defining polynomial P, as the per-place escape-rate average.

    Detected preperiodic rational points return exactly 0.0.  P is not
    checked for irreducibility; for reducible P the value is the average
    over all roots.
    """
    if P.is_zero() or P.degree < 1:
        raise ValueError("need a nonzero polynomial of degree >= 1")
    c = Fraction(c)
    prim = P.primitive_part()
    if prim.coeffs != P.coeffs:
        warnings.warn("polynomial was not primitive; content dropped")
    d = prim.degree
    if d == 1:
        x = Fraction(-prim.coeffs[0], prim.coeffs[1])
        if rational_preperiodic(c, x):
            return 0.0
    bad_primes, cofactor = _factor_or_warn(
        c.denominator, "denominator of the parameter"
    )
    if cofactor > 1:
        raise EscapeRateError(
            f"cannot enumerate the bad-reduction primes: unfactored part "
            f"{cofactor}"
        )
    rootset = find_roots(prim)
    arch_sum = fsum(
        mult * _arch_escape(complex(c), value, tol, 2000)
        for value, mult in rootset.roots
    )
    lead = abs(prim.leading_coefficient)
    # good reduction: sum_i rate_p(alpha_i) = v_p(lc) log p, so the total
    # over all good primes is log|lc| minus the bad primes' share
    good_sum = log(lead) - fsum(
        vp(lead, p) * log(p) for p in bad_primes
    )
    bad_sum = fsum(
        _conjugate_bad_sum(prim, c, p).to_float() for p in bad_primes
    )
    return (arch_sum + good_sum + bad_sum) / d
