"""Point families and the equidistribution experiment runner.

A family generates, for each n, an integer polynomial whose roots form
the n-th Galois orbit.  The runner integrates the Green function of a
divisor against each orbit at a chosen set of places, compares with the
equilibrium values, and tracks the gap as n grows.  Finite-place entries
are exact rational multiples of log p throughout; the archimedean entry
is computed two ways when the divisor is linear (certified roots, and
the exact resultant-style identity) so the root finder audits itself.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import fsum, log
from typing import Callable, Optional

from .arch import (
    GreenSpec,
    empirical_integral_arch,
    empirical_integral_linear,
    equilibrium_integral_circle,
    mahler_univariate,
)
from .heights import weil_height
from .padic import empirical_integral_padic, ensure_prime, equilibrium_integral_gauss
from .poly import IntPoly
from .roots import RootFindingError, find_roots, polynomial_gcd

ARCH = "arch"

# audit tolerance for the two archimedean routes, and the margin (in
# units of the certified root radius) under which the root-based route is
# declared saturated rather than merely disagreeing
ARCH_AUDIT_TOL = 1e-6
SATURATION_MARGIN = 1e6

FLAG_COLLISION = "divisor_collision"
FLAG_ROOTS_FAILED = "root_finding_failed"
FLAG_SATURATED = "root_path_saturated"
FLAG_AUDIT_MISMATCH = "arch_audit_mismatch"


@dataclass(frozen=True)
class PointFamily:
    """A deterministic sequence n -> defining polynomial of the n-th orbit."""

    name: str
    generator: Callable[[int], IntPoly]
    description: str = ""

    def __call__(self, n: int) -> IntPoly:
        if n < 1:
            raise ValueError("family index must be at least 1")
        P = self.generator(n)
        if not isinstance(P, IntPoly) or P.is_zero() or P.degree < 1:
            raise ValueError(
                f"family {self.name!r} produced a degenerate polynomial at n={n}"
            )
        return P


def family_autissier() -> PointFamily:
    """Monic family (T^n - 1)(T - 2) + 3.

    Every member takes the value 3 at T = 2, so the orbits are S-integral
    relative to the divisor {T = 2} for S = {arch, 3}, while their heights
    shrink like (log 2)/n: the ingredients of a persistent gap against the
    circle equilibrium measure.
    """
    T = IntPoly((0, 1))

    def gen(n: int) -> IntPoly:
        return (T**n - 1) * (T - 2) + 3

    return PointFamily("autissier", gen, "(T^n - 1)(T - 2) + 3")


def family_power_shift(a: int) -> PointFamily:
    """Family T^n - a for a fixed integer a with |a| >= 2.

    Heights decay like (log|a|)/n and the orbits spread over circles of
    radius |a|^(1/n) -> 1, so empirical integrals of any divisor avoiding
    the unit circle converge to the equilibrium values."""
    a = int(a)
    if abs(a) < 2:
        raise ValueError("need |a| >= 2 for a nontrivial family")
    T = IntPoly((0, 1))

    def gen(n: int) -> IntPoly:
        return T**n - a

    return PointFamily(f"power-shift-{a}", gen, f"T^n - {a}")


def predicted_limit(
    h_D: float,
    h_X: float,
    d: int,
    degD: int,
    degX: int,
    equilibrium_sum: float,
) -> float:
    """Limit of the summed empirical integrals for orbits that are
    S-integral along the divisor and of asymptotically minimal height:

        equilibrium_sum + (d*degD/degX) * (h_D/(d*degD) - h_X/((d+1)*degX))

    with h_D the divisor height, h_X the ambient height, d the ambient
    dimension.  When h_D attains the minimum forced by h_X the correction
    vanishes and the equilibrium value is the limit; any excess height of
    the divisor survives as a gap."""
    if d < 1:
        raise ValueError("ambient dimension must be at least 1")
    if degD < 1 or degX < 1:
        raise ValueError("divisor and ambient degrees must be at least 1")
    correction = (d * degD / degX) * (
        h_D / (d * degD) - h_X / ((d + 1) * degX)
    )
    return equilibrium_sum + correction


@dataclass(frozen=True)
class ExperimentRow:
    """Per-index record: empirical/equilibrium tuples are aligned with the
    report's place list; archimedean entries are floats, finite entries
    exact LocalValue instances.  Entries are None on flagged failures."""

    n: int
    degree: int
    height: float
    empirical: tuple
    equilibrium: tuple
    gap: Optional[float]
    arch_audit: Optional[float] = None
    flags: tuple = ()


@dataclass(frozen=True)
class ExperimentReport:
    family: str
    divisor: IntPoly
    places: tuple
    rows: tuple
    predicted_limit: float
    gap_series: tuple
    truncation: Optional[float] = None


def _resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        env = os.environ.get("MAHLERHEIGHTS_THREADS", "").strip()
        if env:
            threads = int(env)
    if threads is None:
        threads = min(8, os.cpu_count() or 1)
    if threads < 1:
        raise ValueError("thread count must be at least 1")
    return threads


def _arch_pieces(P, rootset, spec, a_root, lc_adjust, truncation):
    """Reported archimedean empirical value, root-based audit value, and
    flags.  The exact identity route is reported when the divisor is
    linear; the root-based route is retained as an audit and flagged when
    the roots sit too close to the divisor for float evaluation."""
    flags = []
    identity = None
    if a_root is not None:
        identity = empirical_integral_linear(P, rootset, a_root) - lc_adjust
    audit = None
    try:
        audit = empirical_integral_arch(rootset, spec, truncation)
    except ValueError:
        flags.append(FLAG_SATURATED)
    if audit is not None:
        G = spec.divisor_poly
        closest = min(
            abs(complex(G.evaluate(value))) for value, _ in rootset.roots
        )
        floor = SATURATION_MARGIN * max(rootset.radius_bound, 5e-16)
        if closest < floor:
            flags.append(FLAG_SATURATED)
        elif identity is not None and abs(audit - identity) > ARCH_AUDIT_TOL:
            flags.append(FLAG_AUDIT_MISMATCH)
    reported = identity if identity is not None else audit
    return reported, audit, flags


def run_experiment(
    family: PointFamily,
    G: IntPoly,
    places,
    ns,
    truncation: Optional[float] = None,
    threads: Optional[int] = None,
) -> ExperimentReport:
    """Integrate the Green function of the divisor G against each orbit of
    the family at every requested place.

    Places are "arch" or prime numbers.  Finite places require a divisor
    of degree <= 1 (the empirical value is then exact).  Rows with a
    divisor collision or a root-finding failure are flagged, not fatal.
    """
    if not isinstance(G, IntPoly) or G.is_zero():
        raise ValueError("divisor must be a nonzero integer polynomial")
    if not G.is_primitive():
        raise ValueError("divisor polynomial must be primitive")
    places = tuple(places)
    for place in places:
        if place == ARCH:
            continue
        ensure_prime(place)
    finite_places = [p for p in places if p != ARCH]
    if finite_places and G.degree > 1:
        raise ValueError(
            "finite-place empirical integrals need a divisor of degree <= 1"
        )

    # divisor-side quantities shared by every row
    spec = GreenSpec(G)
    a_root = None
    lc_adjust = 0.0
    if G.degree == 1:
        a_root = Fraction(-G.coeffs[0], G.coeffs[1])
        lc_adjust = log(abs(G.coeffs[1]))
    equilibrium = tuple(
        equilibrium_integral_circle(spec) if place == ARCH
        else equilibrium_integral_gauss(G, place)
        for place in places
    )
    eq_sum = fsum(float(e) for e in equilibrium)
    if G.degree >= 1:
        limit = predicted_limit(mahler_univariate(G), 0.0, 1, G.degree, 1, eq_sum)
    else:
        limit = eq_sum

    need_roots = ARCH in places and G.degree >= 1

    def compute_row(n: int) -> ExperimentRow:
        P = family(n)
        flags = []
        collided = polynomial_gcd(P, G).degree >= 1
        if collided:
            flags.append(FLAG_COLLISION)
        rootset = None
        if not collided and need_roots:
            try:
                rootset = find_roots(P)
            except RootFindingError:
                flags.append(FLAG_ROOTS_FAILED)
        try:
            height = weil_height(P, rootset=rootset).total
        except RootFindingError:
            height = float("nan")
            if FLAG_ROOTS_FAILED not in flags:
                flags.append(FLAG_ROOTS_FAILED)

        empirical = []
        audit = None
        for place in places:
            if collided:
                empirical.append(None)
            elif place == ARCH:
                if G.degree == 0:
                    empirical.append(0.0)
                elif rootset is None:
                    empirical.append(None)
                else:
                    value, audit, arch_flags = _arch_pieces(
                        P, rootset, spec, a_root, lc_adjust, truncation
                    )
                    empirical.append(value)
                    flags.extend(arch_flags)
            elif G.degree == 0:
                empirical.append(equilibrium_integral_gauss(G, place))
            else:
                empirical.append(empirical_integral_padic(P, a_root, place))
        gap = None
        if all(e is not None for e in empirical):
            gap = fsum(float(e) for e in empirical) - eq_sum
        return ExperimentRow(
            n=n,
            degree=P.degree,
            height=height,
            empirical=tuple(empirical),
            equilibrium=equilibrium,
            gap=gap,
            arch_audit=audit,
            flags=tuple(flags),
        )

    ns = [int(n) for n in ns]
    workers = _resolve_threads(threads)
    if workers == 1 or len(ns) <= 1:
        rows = [compute_row(n) for n in ns]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(compute_row, ns))

    return ExperimentReport(
        family=family.name,
        divisor=G,
        places=places,
        rows=tuple(rows),
        predicted_limit=limit,
        gap_series=tuple(row.gap for row in rows),
        truncation=truncation,
    )
