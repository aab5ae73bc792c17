"""Exact p-adic local data: valuations, Newton polygons, Gauss norms and
finite-place integrals.

Everything here is exact rational arithmetic; a finite-place quantity is a
rational multiple of log p and is only converted to a float at the
reporting boundary (:meth:`LocalValue.to_float`).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import log

from .poly import IntPoly, MultiPoly

INFINITY = float("inf")

# Trial division bound for primality checks and prime enumeration.
PRIME_TRIAL_BOUND = 10**6


class IncompletePlaceSet(RuntimeWarning):
    """A factor survived trial division, so the prime list may be missing
    large primes."""


def prime_status(n: int, trial_bound: int = PRIME_TRIAL_BOUND):
    """True/False when trial division up to the bound decides primality,
    None when n is too large to settle."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if d > trial_bound:
            return None
        if n % d == 0:
            return False
        d += 2
    return True


def ensure_prime(p: int, allow_unverified: bool = False) -> None:
    status = prime_status(p)
    if status is False:
        raise ValueError(f"{p} is not prime")
    if status is None and not allow_unverified:
        raise ValueError(
            f"cannot verify primality of {p} by trial division; "
            "pass allow_unverified=True to trust it"
        )


def vp(x, p: int, allow_unverified: bool = False):
    """p-adic valuation of an integer or rational; v_p(0) is +inf.

    Satisfies v_p(xy) = v_p(x) + v_p(y).
    """
    ensure_prime(p, allow_unverified)
    if x == 0:
        return INFINITY
    if isinstance(x, Fraction):
        return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)
    return _vp_int(int(x), p)


def _vp_int(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class LocalValue:
    """An exact rational multiple of log p."""

    coefficient_of_log_p: Fraction
    p: int

    def to_float(self) -> float:
        return float(self.coefficient_of_log_p) * log(self.p)

    def __float__(self) -> float:
        return self.to_float()

    def __str__(self):
        return f"{self.coefficient_of_log_p} * log({self.p})"


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of the points (i, v_p(a_i)) over nonzero a_i.

    Slopes increase strictly left to right; a root of valuation w
    corresponds to a segment of slope -w.
    """

    p: int
    points: tuple
    vertices: tuple
    segments: tuple  # (slope: Fraction, width: int)

    @property
    def total_width(self) -> int:
        return sum(w for _, w in self.segments)


def newton_polygon(P, p: int) -> NewtonPolygon:
    """Exact Newton polygon of a univariate polynomial (integer or rational
    coefficients) at the prime p."""
    ensure_prime(p)
    coeffs = P.coeffs
    if not coeffs:
        raise ValueError("Newton polygon of the zero polynomial is undefined")
    points = tuple(
        (i, vp(c, p)) for i, c in enumerate(coeffs) if c != 0
    )
    vertices = _lower_hull(points)
    segments = []
    for (i1, v1), (i2, v2) in zip(vertices, vertices[1:]):
        segments.append((Fraction(v2 - v1, i2 - i1), i2 - i1))
    return NewtonPolygon(p=p, points=points, vertices=tuple(vertices),
                         segments=tuple(segments))


def _lower_hull(points):
    # monotone chain over exact data; collinear interior points are dropped,
    # so consecutive slopes are strictly increasing
    hull = []
    for pt in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    return hull


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def root_valuations(np: NewtonPolygon):
    """Valuations of the nonzero-part roots as (valuation, multiplicity)
    pairs, in decreasing valuation order; multiplicities sum to the hull
    width."""
    return tuple((-slope, width) for slope, width in np.segments)


def gauss_norm_exponent(F, p: int) -> int:
    """-min_i v_p(coefficients); the Gauss norm of F is p to this power.

    Zero for every primitive polynomial at every prime.
    """
    ensure_prime(p)
    if isinstance(F, MultiPoly):
        coeffs = list(F.coefficients())
    else:
        coeffs = [c for c in F.coeffs if c != 0]
    if not coeffs:
        raise ValueError("Gauss norm of the zero polynomial is undefined")
    return -min(_vp_int(c, p) for c in coeffs)


def finite_local_mahler(P: IntPoly, p: int) -> LocalValue:
    """Sum of log max(1, |root|_p) over the roots of P, via the Newton
    polygon: segments of positive slope contribute slope * width.

    For primitive P this equals v_p(leading coefficient) * log p.
    Always nonnegative.
    """
    np = newton_polygon(P, p)
    total = Fraction(0)
    for slope, width in np.segments:
        if slope > 0:
            total += slope * width
    return LocalValue(total, p)


def empirical_integral_padic(P: IntPoly, a, p: int) -> LocalValue:
    """Average over the roots of P of log max(1,|alpha|_p) - log|alpha - a|_p,
    as an exact rational multiple of log p.

    Uses v_p(P(a)) - v_p(a_d) = sum of v_p(alpha_i - a), so no p-adic root
    splitting is needed.  Invariant under scaling P by a nonzero integer.
    """
    ensure_prime(p)
    d = P.degree
    if d < 1:
        raise ValueError("orbit polynomial must have degree >= 1")
    a = Fraction(a)
    value_at_a = P.evaluate(a)
    if value_at_a == 0:
        raise ValueError(f"divisor point {a} is a root of the orbit polynomial")
    v_lead = _vp_int(P.leading_coefficient, p)
    v_min = min(_vp_int(c, p) for c in P.coeffs if c != 0)
    v_at_a = vp(value_at_a, p)
    return LocalValue(Fraction((v_lead - v_min) + (v_at_a - v_lead), d), p)


def equilibrium_integral_gauss(G: IntPoly, p: int) -> LocalValue:
    """Finite-place equilibrium integral for a primitive divisor polynomial.

    The relevant measure is the Dirac mass at the Gauss point, where a
    primitive polynomial has norm one, so the value is exactly zero.
    """
    ensure_prime(p)
    if G.is_zero() or G.content() != 1:
        raise ValueError("divisor polynomial must be primitive")
    return LocalValue(Fraction(0), p)


def relevant_primes(P: IntPoly, a=None, extra=(), trial_bound: int = PRIME_TRIAL_BOUND):
    """Candidate primes at which P or the divisor point a can contribute a
    nonzero local term: divisors of the leading coefficient, of the
    primitive constant term, of P(a) and of a's denominator.

    Factors are found by trial division up to the bound; a surviving
    cofactor triggers an IncompletePlaceSet warning.  User-supplied primes
    in ``extra`` are validated and merged in.
    """
    if P.is_zero():
        raise ValueError("zero polynomial")
    targets = [P.leading_coefficient, P.content()]
    prim = P.primitive_part()
    if prim.coeffs[0] != 0:
        targets.append(prim.coeffs[0])
    if a is not None:
        a = Fraction(a)
        value = P.evaluate(a)
        if value != 0:
            targets.append(value.numerator)
        targets.append(value.denominator)
        targets.append(a.denominator)
    primes = set()
    for n in targets:
        found, cofactor = _trial_factor(int(n), trial_bound)
        primes |= found
        if cofactor > 1:
            warnings.warn(
                f"possibly incomplete place set: {cofactor} not factored "
                f"by trial division up to {trial_bound}",
                IncompletePlaceSet,
            )
    for q in extra:
        ensure_prime(q, allow_unverified=True)
        primes.add(q)
    return sorted(primes)


def _trial_factor(n: int, bound: int):
    """Primes dividing n found by trial division, plus the unfactored
    cofactor (1 when fully factored; any surviving cofactor exceeds bound^2
    and has no prime factor <= bound)."""
    n = abs(n)
    found = set()
    if n <= 1:
        return found, 1
    for d in (2, 3):
        if n % d == 0:
            found.add(d)
            while n % d == 0:
                n //= d
    d = 5
    while d * d <= n:
        if d > bound:
            return found, n
        if n % d == 0:
            found.add(d)
            while n % d == 0:
                n //= d
        d += 2 if d % 6 == 5 else 4  # skip multiples of 2 and 3
    if n > 1:
        found.add(n)
    return found, 1
