"""Root finding: correctness, multiplicities, certification, failure
reporting."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mahlerheights.poly import IntPoly, parse_univariate
from mahlerheights.roots import (
    RootFindingError,
    find_roots,
    polynomial_gcd,
    refine_root,
    square_free_decomposition,
)

P5 = parse_univariate("(T^5-1)*(T-2)+3")


def poly_strategy(max_degree=12, max_coeff=10**6):
    return (
        st.lists(st.integers(-max_coeff, max_coeff), min_size=3,
                 max_size=max_degree + 1)
        .map(IntPoly)
        .filter(lambda p: p.degree >= 2)
    )


class TestFindRoots:
    def test_quadratic_units(self):
        rs = find_roots(IntPoly((1, 0, 1)))
        values = sorted(rs.values().tolist(), key=lambda z: z.imag)
        assert values[0] == pytest.approx(-1j, abs=1e-14)
        assert values[1] == pytest.approx(1j, abs=1e-14)
        assert rs.residual_bound < 1e-14

    def test_linear(self):
        rs = find_roots(IntPoly((-2, 1)))
        assert rs.roots == ((2 + 0j, 1),)

    def test_family_member_structure(self):
        rs = find_roots(P5)
        assert rs.total_multiplicity == 6
        # one real root close to 2 - 3/(2^5 - 1) (the first-order location;
        # the value below is the converged one), the rest near the unit circle
        near_two = [v for v, _ in rs.roots if abs(v - 2) < 0.5]
        assert len(near_two) == 1
        assert abs(near_two[0] - (2 - 3 / 31)) < 0.05
        assert abs(near_two[0] - 1.8581772017435543) < 1e-9
        others = [v for v, _ in rs.roots if abs(v - 2) >= 0.5]
        assert all(0.8 < abs(v) < 1.5 for v in others)

    def test_family_roots_approach_circle(self):
        p = parse_univariate("(T^40-1)*(T-2)+3")
        rs = find_roots(p)
        moduli = sorted(abs(v) for v, _ in rs.roots)
        # all roots but the one near 2 hug the unit circle at this size
        assert all(abs(m - 1) < 0.06 for m in moduli[:-1])
        assert abs(moduli[-1] - 2) < 0.01

    def test_zero_roots_split_off(self):
        # T^3 * (T - 2)
        rs = find_roots(IntPoly((0, 0, 0, -2, 1)))
        assert (0j, 3) in rs.roots
        assert any(abs(v - 2) < 1e-12 and m == 1 for v, m in rs.roots)

    def test_exact_multiplicity_detection(self):
        # (T - 1)^2 * (T + 3)
        p = parse_univariate("(T-1)^2*(T+3)")
        rs = find_roots(p)
        mults = {round(v.real): m for v, m in rs.roots}
        assert mults == {1: 2, -3: 1}

    def test_high_multiplicity(self):
        p = parse_univariate("(T-2)^4")
        rs = find_roots(p)
        assert rs.roots == ((2 + 0j, 4),)

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            find_roots(IntPoly((5,)))
        with pytest.raises(ValueError):
            find_roots(IntPoly(()))

    def test_unattainable_residual_reported(self):
        # sqrt(2) is not a float, so the scaled residual cannot reach 1e-30
        with pytest.raises(RootFindingError):
            find_roots(IntPoly((-2, 0, 1)), target_residual=1e-30)

    def test_cyclotomic_moduli(self):
        rs = find_roots(parse_univariate("T^12-1"))
        for v, _ in rs.roots:
            assert abs(abs(v) - 1) <= max(rs.radius_bound, 1e-13)

    @settings(max_examples=40, deadline=None)
    @given(p=poly_strategy())
    def test_vieta_sum(self, p):
        rs = find_roots(p)
        total = sum(v * m for v, m in rs.roots)
        expected = -p.coeffs[p.degree - 1] / p.leading_coefficient
        scale = 1.0 + abs(expected)
        assert abs(total - expected) <= max(
            p.degree * rs.radius_bound, 1e-9 * scale
        )

    @settings(max_examples=40, deadline=None)
    @given(p=poly_strategy())
    def test_vieta_product(self, p):
        if p.coeffs[0] == 0:
            return
        rs = find_roots(p)
        log_prod = sum(m * np.log(abs(v)) for v, m in rs.roots)
        expected = np.log(abs(p.coeffs[0] / p.leading_coefficient))
        assert log_prod == pytest.approx(expected, abs=1e-8, rel=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(p=poly_strategy(max_degree=9, max_coeff=40))
    def test_reconstruction(self, p):
        rs = find_roots(p)
        mono = np.poly(rs.values())  # descending monic coefficients
        rebuilt = rs.leading_coeff * mono[::-1]
        target = np.array([float(c) for c in p.coeffs], dtype=complex)
        scale = np.max(np.abs(target))
        assert np.max(np.abs(rebuilt - target)) <= scale * 1e-8

    def test_big_degree_random(self):
        rng = np.random.default_rng(7)
        coeffs = rng.integers(-10**6, 10**6, size=257).tolist()
        coeffs[-1] = coeffs[-1] or 1
        rs = find_roots(IntPoly([int(c) for c in coeffs]))
        assert rs.total_multiplicity == 256
        assert rs.residual_bound < 1e-12


class TestSquareFree:
    def test_squarefree_passthrough(self):
        out = square_free_decomposition(P5)
        assert len(out) == 1
        assert out[0][1] == 1
        assert out[0][0].coeffs == P5.coeffs

    def test_mixed_multiplicities(self):
        p = parse_univariate("(T-1)^3*(T+1)^3*(T-4)")
        out = dict()
        for fac, mult in square_free_decomposition(p):
            out[mult] = fac
        assert sorted(out) == [1, 3]
        assert out[1].coeffs == (-4, 1)
        assert out[3].coeffs == (-1, 0, 1)  # (T-1)(T+1)

    def test_content_ignored(self):
        p = 6 * parse_univariate("(T-1)^2")
        out = square_free_decomposition(p)
        assert out == [(IntPoly((-1, 1)), 2)]

    @settings(max_examples=30, deadline=None)
    @given(
        a=st.integers(-5, 5),
        b=st.integers(-5, 5),
        k=st.integers(1, 4),
    )
    def test_reassembly(self, a, b, k):
        base = IntPoly((a, 1))
        other = IntPoly((b, 2))
        p = (base**k) * other
        if p.degree < 1:
            return
        product = IntPoly((1,))
        total = 0
        for fac, mult in square_free_decomposition(p):
            product = product * fac**mult
            total += fac.degree * mult
        assert total == p.degree
        prim = p.primitive_part()
        if prim.leading_coefficient < 0:
            prim = -prim
        assert product == prim


class TestRefineRoot:
    def test_sqrt_two(self):
        z = refine_root(IntPoly((-2, 0, 1)), 1.4)
        assert z.real == pytest.approx(2**0.5, abs=1e-15)

    def test_double_root_flagged(self):
        with pytest.raises(RootFindingError):
            refine_root(IntPoly((0, 0, 1)), 0.1)

    def test_family_root_near_two(self):
        z = refine_root(P5, 2.0)
        assert abs(complex(P5.evaluate(z))) < 1e-10
        assert abs(z - (2 - 3 / 31)) < 0.05
        assert abs(z - 1.8581772017435543) < 1e-9

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            refine_root(IntPoly((3,)), 1.0)


class TestPolynomialGcd:
    def test_shared_linear_factor(self):
        A = IntPoly((-1, 1)) * IntPoly((2, 1))
        B = IntPoly((-1, 1)) * IntPoly((-3, 1))
        assert polynomial_gcd(A, B) == IntPoly((-1, 1))

    def test_coprime_gives_unit(self):
        G = polynomial_gcd(IntPoly((-1, 1)), IntPoly((1, 1)))
        assert G == IntPoly((1,))

    def test_content_and_sign_normalized(self):
        # Outputs are primitive with positive leading coefficient even
        # when the inputs are neither.
        assert polynomial_gcd(IntPoly((-6, 6)), IntPoly((-4, 4))) == IntPoly((-1, 1))
        assert polynomial_gcd(IntPoly((1, -1)), IntPoly((2, -2))) == IntPoly((-1, 1))

    def test_zero_arguments(self):
        assert polynomial_gcd(IntPoly((0,)), IntPoly((-6, 6))) == IntPoly((-1, 1))
        assert polynomial_gcd(IntPoly((-4, 0, 2)), IntPoly((0,))) == IntPoly((-2, 0, 1))
        with pytest.raises(ValueError):
            polynomial_gcd(IntPoly((0,)), IntPoly((0,)))

    def test_repeated_factor_multiplicity(self):
        square = IntPoly((-1, 1)) * IntPoly((-1, 1))
        A = square * IntPoly((5, 1))
        B = square * IntPoly((7, 2))
        assert polynomial_gcd(A, B) == square

    @given(poly_strategy(max_degree=6, max_coeff=50),
           poly_strategy(max_degree=6, max_coeff=50))
    @settings(max_examples=40, deadline=None)
    def test_common_factor_detected(self, U, V):
        # Planting a common factor guarantees a nonconstant gcd, and the
        # symmetric call agrees.
        C = IntPoly((-1, 1))
        G = polynomial_gcd(U * C, V * C)
        assert G.degree >= 1
        assert G == polynomial_gcd(V * C, U * C)
        assert abs(G.evaluate(1)) == 0
