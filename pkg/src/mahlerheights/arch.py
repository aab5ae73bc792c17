"""Archimedean local quantities.

Mahler measures both ways (root-based through Jensen's formula, and
polycircle torus quadrature), Green function evaluation for the standard
Weil metric of a divisor, and integrals of that Green function against
empirical root measures and the unit-circle equilibrium measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import fsum, isinf, log

import numpy as np

from . import _kernels
from .poly import IntPoly, MultiPoly
from .roots import RootSet, find_roots

# Nodes where |F| falls below this are treated as lying on the zero set of
# F: dropped from the quadrature sum and counted.
QUADRATURE_FLOOR = 1e-300


def log_abs_rational(q) -> float:
    """log|q| for an exact rational, safe for numerators and denominators
    far beyond float range."""
    q = Fraction(q)
    if q == 0:
        raise ValueError("log|0| is infinite")
    return log(abs(q.numerator)) - log(q.denominator)


@dataclass(frozen=True)
class GreenSpec:
    """A divisor polynomial with the standard Weil metric and a sign
    choice: sign +1 evaluates log of the inverse section norm (the Green
    function, +inf on the divisor), sign -1 its negative."""

    divisor_poly: object
    metric: str = "weil_standard"
    sign: int = 1

    def __post_init__(self):
        G = self.divisor_poly
        if not isinstance(G, (IntPoly, MultiPoly)):
            raise TypeError("divisor polynomial must be IntPoly or MultiPoly")
        if G.is_zero():
            raise ValueError("divisor polynomial must be nonzero")
        if isinstance(G, MultiPoly) and not G.is_homogeneous():
            raise ValueError("multivariate divisor polynomial must be homogeneous")
        if self.metric != "weil_standard":
            raise ValueError(f"unsupported metric {self.metric!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def divisor_degree(self) -> int:
        G = self.divisor_poly
        return G.total_degree if isinstance(G, MultiPoly) else G.degree


@dataclass(frozen=True)
class QuadratureResult:
    estimate: float
    error_estimate: float  # |coarse grid - doubled grid|, not a bound
    nodes_dropped: int
    grid: int = 0


def mahler_from_roots(rootset: RootSet) -> float:
    """log M from a certified root set: log|leading| plus the log of every
    root modulus exceeding one."""
    parts = [log(abs(rootset.leading_coeff))]
    for value, mult in rootset.roots:
        a = abs(value)
        if a > 1.0:
            parts.append(mult * log(a))
    return fsum(parts)


def mahler_univariate(P: IntPoly, rootset: RootSet | None = None) -> float:
    """log of the Mahler measure of P by Jensen's formula.

    The error inherited from root finding is at most degree * radius_bound
    of the underlying root set.  Pass a precomputed ``rootset`` to avoid
    re-finding roots.
    """
    if P.is_zero():
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    if P.degree == 0:
        return log(abs(P.coeffs[0]))
    if rootset is None:
        rootset = find_roots(P)
    return mahler_from_roots(rootset)


def _circle_nodes(N: int):
    return np.exp(2j * np.pi * np.arange(N) / N)


def _torus_values(F: MultiPoly, N: int):
    """F(1, e^{i theta_1}, ..., e^{i theta_n}) on the tensor grid with N
    nodes per axis; dense array of shape (N,)*n."""
    n = F.nvars - 1
    if n == 0:
        return np.array([complex(F.evaluate((1,)))])
    axis = _circle_nodes(N)
    values = np.zeros((N,) * n, dtype=complex)
    for exps in sorted(F.terms):  # fixed order: deterministic accumulation
        c = F.terms[exps]
        grid = None
        for e in exps[1:]:  # x_0 is pinned to 1
            vec = axis**e
            grid = vec if grid is None else np.multiply.outer(grid, vec)
        values += c * grid
    return values


def _quadrature_pass(F, N: int):
    if isinstance(F, IntPoly):
        values = _kernels.polyval_points(
            [float(c) for c in F.coeffs], _circle_nodes(N)
        )
    else:
        values = _torus_values(F, N)
    total, dropped = _kernels.log_abs_sum(np.ravel(values), QUADRATURE_FLOOR)
    kept = values.size - dropped
    if kept == 0:
        raise ValueError("every quadrature node fell on the zero set of F")
    return total / kept, dropped


def mahler_quadrature(F, grid: int = 4096) -> QuadratureResult:
    """Polycircle integral of log|F| by tensor-product trapezoid rule.

    F is either univariate (integrated over the unit circle) or a
    homogeneous MultiPoly in n+1 variables (integrated over the n-torus
    with the first variable pinned to 1).  The rule is run at ``grid`` and
    2*``grid`` nodes per axis; the difference is reported as
    error_estimate and the finer estimate is returned.
    """
    if grid < 4 or grid & (grid - 1):
        raise ValueError("grid must be a power of two, at least 4")
    if isinstance(F, MultiPoly):
        if F.is_zero():
            raise ValueError("zero polynomial")
        if F.nvars == 1:
            F = F.to_univariate()
        elif not F.is_homogeneous():
            raise ValueError("multivariate F must be homogeneous")
    elif isinstance(F, IntPoly):
        if F.is_zero():
            raise ValueError("zero polynomial")
    else:
        raise TypeError("F must be IntPoly or MultiPoly")
    coarse, _ = _quadrature_pass(F, grid)
    fine, dropped = _quadrature_pass(F, 2 * grid)
    return QuadratureResult(
        estimate=fine,
        error_estimate=abs(fine - coarse),
        nodes_dropped=dropped,
        grid=grid,
    )


def green_eval(spec: GreenSpec, t) -> float:
    """Green function of the divisor at a point.

    Univariate G of degree m at a complex t:
        sign * (m * log max(1, |t|) - log|G(t)|).
    Homogeneous G at a coordinate tuple x:
        sign * (m * log max_i |x_i| - log|G(x)|).
    On the divisor the value is sign * inf (an explicit sentinel, never an
    exception).
    """
    G = spec.divisor_poly
    m = spec.divisor_degree
    if isinstance(G, MultiPoly):
        coords = tuple(complex(c) for c in t)
        if len(coords) != G.nvars:
            raise ValueError(f"expected {G.nvars} homogeneous coordinates")
        sup = max(abs(c) for c in coords)
        if sup == 0.0:
            raise ValueError("all homogeneous coordinates vanish")
        value = complex(G.evaluate(coords))
        if value == 0:
            return spec.sign * float("inf")
        return spec.sign * (m * log(sup) - log(abs(value)))
    z = complex(t)
    value = complex(G.evaluate(z))
    if value == 0:
        return spec.sign * float("inf")
    return spec.sign * (m * log(max(1.0, abs(z))) - log(abs(value)))


def empirical_integral_arch(orbit: RootSet, spec: GreenSpec,
                            truncation: float | None = None) -> float:
    """Average of the Green function over the orbit roots (weighted by
    multiplicity).

    With a truncation level B the integrand becomes min(B, green), which
    stays finite when the orbit meets the divisor; without truncation that
    situation is an error.  A -inf value (sign -1 on the divisor) cannot
    be truncated away and always errors.
    """
    d = orbit.total_multiplicity
    if d == 0:
        raise ValueError("empty orbit")
    terms = []
    for value, mult in orbit.roots:
        phi = green_eval(spec, value)
        if isinf(phi):
            if phi < 0 or truncation is None:
                raise ValueError(
                    "orbit meets the divisor; supply a truncation level"
                )
            phi = truncation
        elif truncation is not None:
            phi = min(truncation, phi)
        terms.append(mult * phi)
    return fsum(terms) / d


def empirical_integral_linear(P: IntPoly, orbit: RootSet, a) -> float:
    """Empirical integral of the Green function of the divisor {T = a},
    with the root-to-divisor distances eliminated exactly:

        (1/d) sum_i [log max(1,|alpha_i|) - log|alpha_i - a|]
            = (log M(P) - log|P(a)|) / d,

    since prod(alpha_i - a) = +-P(a)/lc.  Root moduli come from the
    certified orbit; |P(a)| is evaluated in exact rational arithmetic, so
    roots far closer to a than float spacing cost no precision.
    """
    d = orbit.total_multiplicity
    value = P.evaluate(Fraction(a))
    if value == 0:
        raise ValueError(f"divisor point {a} is a root of the orbit polynomial")
    return (mahler_from_roots(orbit) - log_abs_rational(value)) / d


def equilibrium_integral_circle(spec: GreenSpec) -> float:
    """Integral of the Green function against normalized arc length on the
    unit circle; by Jensen this is sign * (-log M(G))."""
    G = spec.divisor_poly
    if not isinstance(G, IntPoly):
        raise ValueError("equilibrium integral requires a univariate divisor")
    return spec.sign * (-mahler_univariate(G))
