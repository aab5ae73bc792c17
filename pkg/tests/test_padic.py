"""Valuations, Newton polygons and exact finite-place integrals."""

import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mahlerheights.padic import (
    INFINITY,
    IncompletePlaceSet,
    LocalValue,
    empirical_integral_padic,
    equilibrium_integral_gauss,
    finite_local_mahler,
    gauss_norm_exponent,
    newton_polygon,
    prime_status,
    relevant_primes,
    root_valuations,
    vp,
)
from mahlerheights.poly import IntPoly, MultiPoly, parse_univariate

P5 = parse_univariate("(T^5-1)*(T-2)+3")

SMALL_PRIMES = [2, 3, 5, 7, 31]


def autissier_member(n: int) -> IntPoly:
    return parse_univariate(f"(T^{n}-1)*(T-2)+3")


def nonzero_polys(max_degree=8, max_coeff=60):
    return (
        st.lists(st.integers(-max_coeff, max_coeff), min_size=1, max_size=max_degree + 1)
        .map(IntPoly)
        .filter(lambda p: not p.is_zero())
    )


class TestValuation:
    def test_small_values(self):
        assert vp(3, 3) == 1
        assert vp(6, 2) == 1
        assert vp(31, 3) == 0

    def test_zero_is_infinite(self):
        assert vp(0, 5) == INFINITY

    def test_rational_argument(self):
        assert vp(Fraction(1, 2), 2) == -1
        assert vp(Fraction(9, 4), 3) == 2

    def test_composite_rejected(self):
        with pytest.raises(ValueError):
            vp(10, 4)
        with pytest.raises(ValueError):
            vp(10, 1)

    def test_prime_status(self):
        assert prime_status(2) is True
        assert prime_status(97) is True
        assert prime_status(91) is False
        semiprime = 1000003 * 1000033  # both factors prime and above the bound
        assert prime_status(semiprime, trial_bound=100) is None

    @given(
        x=st.fractions(min_value=Fraction(1, 100), max_value=100, max_denominator=100),
        y=st.fractions(min_value=Fraction(1, 100), max_value=100, max_denominator=100),
        p=st.sampled_from(SMALL_PRIMES),
    )
    def test_multiplicative(self, x, y, p):
        assert vp(x * y, p) == vp(x, p) + vp(y, p)


class TestNewtonPolygon:
    def test_eisenstein_quadratic(self):
        np3 = newton_polygon(IntPoly((-3, 0, 1)), 3)
        assert np3.segments == ((Fraction(-1, 2), 2),)

    def test_shifted_family_member(self):
        shifted = P5.shift(2)
        np3 = newton_polygon(shifted, 3)
        assert np3.segments == ((Fraction(-1), 1), (Fraction(0), 5))
        assert np3.vertices[0] == (0, 1)
        assert np3.vertices[1] == (1, 0)

    def test_unit_linear(self):
        np2 = newton_polygon(IntPoly((1, 1)), 2)
        assert np2.segments == ((Fraction(0), 1),)

    def test_slopes_strictly_increase(self):
        np2 = newton_polygon(IntPoly((8, 4, 2, 1)), 2)
        slopes = [s for s, _ in np2.segments]
        assert slopes == sorted(slopes)
        assert len(set(slopes)) == len(slopes)

    def test_width_spans_nonzero_support(self):
        # T^2*(T^3 - 2): first nonzero coefficient at index 2
        p = IntPoly((0, 0, -2, 0, 0, 1))
        np2 = newton_polygon(p, 2)
        assert np2.total_width == p.degree - 2

    @given(p=nonzero_polys(), q=st.sampled_from(SMALL_PRIMES))
    def test_slope_sum_telescopes(self, p, q):
        np_ = newton_polygon(p, q)
        total = sum(slope * width for slope, width in np_.segments)
        first = next(i for i, c in enumerate(p.coeffs) if c != 0)
        assert total == vp(p.leading_coefficient, q) - vp(p.coeffs[first], q)


class TestRootValuations:
    def test_eisenstein(self):
        np3 = newton_polygon(IntPoly((-3, 0, 1)), 3)
        assert root_valuations(np3) == ((Fraction(1, 2), 2),)

    def test_shifted_family_member(self):
        np3 = newton_polygon(P5.shift(2), 3)
        # exactly one root of P5 lies at 3-adic distance 1/3 from 2
        assert root_valuations(np3) == ((Fraction(1), 1), (Fraction(0), 5))

    def test_unit_linear(self):
        np2 = newton_polygon(IntPoly((1, 1)), 2)
        assert root_valuations(np2) == ((Fraction(0), 1),)

    @given(p=nonzero_polys(), q=st.sampled_from(SMALL_PRIMES))
    def test_multiplicities_cover_hull(self, p, q):
        np_ = newton_polygon(p, q)
        assert sum(m for _, m in root_valuations(np_)) == np_.total_width

    @given(
        coeffs=st.lists(st.integers(-40, 40), min_size=2, max_size=8),
        a=st.integers(-10, 10),
        q=st.sampled_from([2, 3, 5]),
    )
    def test_shift_polygon_tracks_value(self, coeffs, a, q):
        # monic P, p-integral a: the negative-slope part of the shifted
        # polygon accounts exactly for v_p(P(a))
        p = IntPoly(tuple(coeffs) + (1,))
        value = p.evaluate(a)
        if value == 0:
            return
        np_ = newton_polygon(p.shift(a), q)
        drop = sum(-slope * width for slope, width in np_.segments if slope < 0)
        assert drop == vp(value, q)


class TestGaussNorm:
    def test_primitive_is_zero(self):
        assert gauss_norm_exponent(P5, 3) == 0

    def test_common_factor(self):
        assert gauss_norm_exponent(IntPoly((6, 3)), 3) == -1

    def test_multivariate(self):
        f = MultiPoly(2, {(1, 0): 4, (0, 1): 2})
        assert gauss_norm_exponent(f, 2) == -1
        assert gauss_norm_exponent(f.primitive_part(), 2) == 0

    @given(p=nonzero_polys(), q=st.sampled_from(SMALL_PRIMES))
    def test_primitive_normalization(self, p, q):
        assert gauss_norm_exponent(p.primitive_part(), q) == 0


class TestFiniteLocalMahler:
    def test_monic_vanishes(self):
        assert finite_local_mahler(P5, 3).coefficient_of_log_p == 0

    def test_half_root(self):
        lv = finite_local_mahler(IntPoly((-1, 2)), 2)
        assert lv == LocalValue(Fraction(1), 2)

    def test_float_conversion(self):
        import math

        lv = finite_local_mahler(IntPoly((-1, 2)), 2)
        assert float(lv) == pytest.approx(math.log(2))

    @given(p=nonzero_polys(max_coeff=500), q=st.sampled_from(SMALL_PRIMES))
    def test_leading_coefficient_identity(self, p, q):
        prim = p.primitive_part()
        assert finite_local_mahler(prim, q).coefficient_of_log_p == vp(
            prim.leading_coefficient, q
        )

    @given(p=nonzero_polys(), q=st.sampled_from(SMALL_PRIMES))
    def test_nonnegative(self, p, q):
        assert finite_local_mahler(p, q).coefficient_of_log_p >= 0


class TestEmpiricalIntegral:
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 10, 37])
    def test_family_value_exact(self, n):
        lv = empirical_integral_padic(autissier_member(n), 2, 3)
        assert lv == LocalValue(Fraction(1, n + 1), 3)

    def test_linear_case(self):
        lv = empirical_integral_padic(IntPoly((-6, 1)), 0, 2)
        assert lv == LocalValue(Fraction(1), 2)

    @pytest.mark.parametrize("n", [1, 2, 7, 40])
    def test_power_family_vanishes(self, n):
        p = IntPoly((-2,) + (0,) * (n - 1) + (1,))
        lv = empirical_integral_padic(p, 1, 5)
        assert lv.coefficient_of_log_p == 0

    def test_root_of_divisor_rejected(self):
        with pytest.raises(ValueError):
            empirical_integral_padic(IntPoly((-2, 1)), 2, 3)

    def test_rational_divisor_point(self):
        # P = 2T - 1 at a = 1/3: v_3(P(1/3)) = v_3(-1/3) = -1, v_3(lc) = 0
        lv = empirical_integral_padic(IntPoly((-1, 2)), Fraction(1, 3), 3)
        assert lv.coefficient_of_log_p == Fraction(-1)

    @given(
        p=nonzero_polys(),
        c=st.integers(-30, 30).filter(lambda c: c != 0),
        a=st.fractions(min_value=-10, max_value=10, max_denominator=6),
        q=st.sampled_from(SMALL_PRIMES),
    )
    def test_scaling_invariance(self, p, c, a, q):
        if p.degree < 1 or p.evaluate(a) == 0:
            return
        scaled = c * p
        assert empirical_integral_padic(p, a, q) == empirical_integral_padic(
            scaled, a, q
        )


class TestEquilibriumIntegral:
    def test_primitive_linear(self):
        assert equilibrium_integral_gauss(IntPoly((-2, 1)), 5).coefficient_of_log_p == 0

    def test_primitive_family_member(self):
        assert equilibrium_integral_gauss(P5, 3).coefficient_of_log_p == 0

    def test_imprimitive_rejected(self):
        with pytest.raises(ValueError):
            equilibrium_integral_gauss(IntPoly((-3, 3)), 3)


class TestRelevantPrimes:
    def test_family_member(self):
        primes = relevant_primes(autissier_member(5), a=2)
        assert 3 in primes

    def test_merges_user_primes(self):
        primes = relevant_primes(IntPoly((1, 1)), extra=(7, 11))
        assert {7, 11} <= set(primes)

    def test_denominator_of_point(self):
        primes = relevant_primes(IntPoly((0, 1)), a=Fraction(1, 6))
        assert {2, 3} <= set(primes)

    def test_large_factor_warns(self):
        big = 10**12 + 39  # not factorable with a tiny trial bound
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            relevant_primes(IntPoly((big, 1)), a=0, trial_bound=10**3)
        assert any(issubclass(w.category, IncompletePlaceSet) for w in caught)
