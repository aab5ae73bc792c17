"""Acceptance gate: seven end-to-end criteria with stated tolerances.

Each test enforces one criterion, including its runtime budget; the
conftest summary hook prints one PASS/FAIL line per criterion at the end
of the run.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from mahlerheights.arch import mahler_quadrature, mahler_univariate
from mahlerheights.equidist import (
    ARCH,
    family_autissier,
    family_power_shift,
    predicted_limit,
    run_experiment,
)
from mahlerheights.heights import canonical_height, weil_height
from mahlerheights.padic import empirical_integral_padic, finite_local_mahler, vp
from mahlerheights.poly import IntPoly

LOG2 = math.log(2)


def minpoly(q: Fraction) -> IntPoly:
    q = Fraction(q)
    return IntPoly((-q.numerator, q.denominator))


def random_primitive(rng, max_degree=20, max_coeff=50) -> IntPoly:
    while True:
        degree = int(rng.integers(1, max_degree + 1))
        coeffs = rng.integers(-max_coeff, max_coeff + 1, size=degree + 1)
        P = IntPoly(tuple(int(c) for c in coeffs))
        if not P.is_zero() and P.degree >= 1:
            return P.primitive_part()


def test_criterion_1_exact_three_adic_integral():
    start = time.perf_counter()
    family = family_autissier()
    for n in range(1, 201):
        lv = empirical_integral_padic(family(n), 2, 3)
        assert lv.p == 3
        assert lv.coefficient_of_log_p == Fraction(1, n + 1)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"took {elapsed:.2f}s, budget 5s"


def test_criterion_2_autissier_gap():
    start = time.perf_counter()
    report = run_experiment(
        family_autissier(), IntPoly((-2, 1)), (ARCH, 3), range(1, 201)
    )
    last = report.rows[-1]
    assert last.n == 200
    assert abs(last.gap - LOG2) < 0.02
    empirical_sum = sum(float(value) for value in last.empirical)
    target = predicted_limit(LOG2, 0.0, 1, 1, 1, -LOG2)
    assert abs(empirical_sum - target) < 0.02
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0, f"took {elapsed:.2f}s, budget 120s"


def test_criterion_3_power_family_gap_and_identity():
    start = time.perf_counter()
    report = run_experiment(
        family_power_shift(2), IntPoly((-1, 1)), (ARCH,), range(1, 201)
    )
    for row in report.rows:
        value = row.empirical[0]
        assert value is not None and row.flags == ()
        assert abs(value) <= LOG2 / row.n + 1e-9
        # reported value uses the exact identity; the audit is the
        # root-based sum, so their scaled difference is the defect in
        # sum_i log|alpha_i - 1| = log|P(1)|
        assert row.arch_audit is not None
        assert row.degree * abs(row.arch_audit - value) <= 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0, f"took {elapsed:.2f}s, budget 120s"


def test_criterion_4_mahler_formula_two_routes():
    start = time.perf_counter()
    rng = np.random.default_rng(20240817)
    quadrature_checked = 0
    for _ in range(100):
        P = random_primitive(rng)
        height = weil_height(P).total
        log_mahler = mahler_univariate(P)
        assert abs(height - log_mahler / P.degree) <= 1e-9
        if P.degree <= 12:
            quad = mahler_quadrature(P, grid=4096)
            tolerance = max(1e-6, 3 * quad.error_estimate)
            assert abs(quad.estimate - log_mahler) <= tolerance
            quadrature_checked += 1
    assert quadrature_checked >= 20
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"took {elapsed:.2f}s, budget 60s"


def test_criterion_5_mahler_nonnegative():
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    for _ in range(1000):
        P = random_primitive(rng)
        assert mahler_univariate(P) >= -1e-10
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"took {elapsed:.2f}s, budget 60s"


def test_criterion_6_gauss_norm_identity():
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    for _ in range(200):
        P = random_primitive(rng)
        lead = P.leading_coefficient
        for p in (2, 3, 5, 7, 31):
            lv = finite_local_mahler(P, p)
            assert lv.coefficient_of_log_p == Fraction(vp(lead, p))
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"took {elapsed:.2f}s, budget 10s"


def test_criterion_7_canonical_heights():
    start = time.perf_counter()
    rng = np.random.default_rng(7)

    # squaring map: canonical height equals the Weil height
    for _ in range(50):
        x = Fraction(int(rng.integers(-60, 61)), int(rng.integers(1, 41)))
        P = minpoly(x)
        assert abs(canonical_height(0, P) - weil_height(P).total) <= 1e-9

    # preperiodic point of z^2 - 1: exact zero
    assert canonical_height(-1, IntPoly((0, 1))) == 0.0

    # functional equation h(f(x)) = 2 h(x)
    xs = []
    while len(xs) < 20:
        x = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 7)))
        if x not in xs:
            xs.append(x)
    for c in (Fraction(1), Fraction(-1), Fraction(1, 2)):
        for x in xs:
            lhs = canonical_height(c, minpoly(x * x + c))
            rhs = 2 * canonical_height(c, minpoly(x))
            assert abs(lhs - rhs) <= 1e-6
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"took {elapsed:.2f}s, budget 30s"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
