import itertools
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridapprox.core_arith import digit_add
from hybridapprox.errors import ParameterError
from hybridapprox.fbpoly import (
    FbPoly,
    is_irreducible,
    iter_G,
    nu_m,
    nu_numerator,
    poly_mul_mod,
    smallest_irreducible,
    warn_zero_generators,
)


def P(b, *coeffs):
    return FbPoly(b, coeffs)


def polys(b, max_deg=5):
    return st.lists(st.integers(0, b - 1), max_size=max_deg + 1).map(lambda c: FbPoly(b, tuple(c)))


def laurent_oracle(num, den, b, m):
    """First m fractional Laurent coefficients of num/den, from plain lists.

    Reduce num mod den, then repeatedly multiply the remainder by x and peel off
    the x^deg(den) coefficient; this is the x^-l digit t_l.
    """
    den = list(den.coeffs)
    d = len(den) - 1
    inv = pow(den[-1], -1, b)
    r = list((num % FbPoly(b, tuple(den))).coeffs) + [0] * (d + 1)
    r = r[:d + 1]
    digits = []
    for _ in range(m):
        r = [0] + r[:d]  # multiply by x; degree stays <= d
        t = r[d] * inv % b
        digits.append(t)
        r = [(ri - t * di) % b for ri, di in zip(r, den)]
    return sum(Fraction(t, b**(i + 1)) for i, t in enumerate(digits))


class TestFbPolyBasics:
    def test_normalisation(self):
        p = FbPoly(2, (1, 3, 2, 0))
        assert p.coeffs == (1, 1)
        assert FbPoly(3, (0, 0)).is_zero()

    def test_degree(self):
        assert FbPoly(2, ()).degree == float("-inf")
        assert P(2, 1, 0, 1).degree == 2

    def test_encoding_round_trip(self):
        for b in (2, 3, 5):
            for v in range(200):
                assert FbPoly.from_int(b, v).to_int() == v

    def test_serialise(self):
        p = FbPoly.parse(2, "1,1,0,1")
        assert p == P(2, 1, 1, 0, 1)
        assert p.serialize() == "1,1,0,1"
        assert str(p) == "x^3 + x + 1"
        assert FbPoly(2, ()).serialize() == "0"

    @pytest.mark.parametrize("text", ["1,2", "a,b"])
    def test_parse_errors(self, text):
        with pytest.raises(ParameterError):
            FbPoly.parse(2, text)

    def test_base_mismatch(self):
        with pytest.raises(ParameterError):
            P(2, 1) + P(3, 1)

    def test_bad_base(self):
        with pytest.raises(ParameterError):
            FbPoly(6, (1,))


class TestArithmetic:
    def test_worked_values(self):
        assert poly_mul_mod(P(2, 1, 1), P(2, 1, 1), P(2, 0, 0, 0, 1)) == P(2, 1, 0, 1)
        assert poly_mul_mod(P(2, 0, 0, 1), P(2, 1), P(2, 1, 1, 1)) == P(2, 1, 1)
        assert poly_mul_mod(P(3), P(3, 0, 1), P(3, 0, 0, 1)).is_zero()

    def test_zero_modulus(self):
        with pytest.raises(ZeroDivisionError):
            poly_mul_mod(P(2, 1), P(2, 1), P(2))

    def test_mod_base_mismatch(self):
        with pytest.raises(ParameterError):
            poly_mul_mod(P(2, 1), P(3, 1), P(2, 1, 1))

    @given(st.sampled_from([2, 3, 5]), st.data())
    def test_division_identity(self, b, data):
        a = data.draw(polys(b, 8))
        d = data.draw(polys(b, 4).filter(lambda p: not p.is_zero()))
        q, r = divmod(a, d)
        assert q * d + r == a
        assert r.is_zero() or r.degree < d.degree

    @given(st.sampled_from([2, 3]), st.data())
    @settings(max_examples=60)
    def test_mul_mod_commutative_associative(self, b, data):
        f = data.draw(polys(b, 5).filter(lambda p: p.degree >= 1))
        a, c, e = (data.draw(polys(b, 5)) for _ in range(3))
        assert poly_mul_mod(a, c, f) == poly_mul_mod(c, a, f)
        assert poly_mul_mod(poly_mul_mod(a, c, f), e, f) == poly_mul_mod(a, poly_mul_mod(c, e, f), f)
        res = poly_mul_mod(a, c, f)
        assert res.is_zero() or res.degree < f.degree


class TestNu:
    def test_worked_values(self):
        f = P(2, 0, 0, 1)
        one = P(2, 1)
        assert nu_m(P(2, 1), one, f, 2) == Fraction(1, 4)
        assert nu_m(P(2, 0, 1), one, f, 2) == Fraction(1, 2)
        assert nu_m(P(2), one, f, 2) == 0
        assert nu_m(P(2, 1, 1), one, f, 2) == Fraction(3, 4)

    def test_degree_checks(self):
        with pytest.raises(ParameterError):
            nu_m(P(2, 1), P(2, 1), P(2, 0, 0, 1), 3)
        with pytest.raises(ParameterError):
            nu_m(P(2, 0, 0, 1), P(2, 1), P(2, 0, 0, 1), 2)

    @given(st.sampled_from([2, 3, 5]), st.integers(1, 5), st.data())
    @settings(max_examples=80)
    def test_matches_laurent_oracle(self, b, m, data):
        low = data.draw(st.lists(st.integers(0, b - 1), min_size=m, max_size=m))
        lead = data.draw(st.integers(1, b - 1))
        f = FbPoly(b, tuple(low) + (lead,))
        v = FbPoly.from_int(b, data.draw(st.integers(0, b**m - 1)))
        g = data.draw(polys(b, 6))
        x = nu_m(v, g, f, m)
        assert x == laurent_oracle(v * g, f, b, m)
        assert (b**m) % x.denominator == 0
        assert 0 <= x < 1

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_additive_in_v(self, m):
        b = 2
        for f_int in range(b**m, b ** (m + 1)):
            f = FbPoly.from_int(b, f_int)
            for g_int in range(b**m):
                g = FbPoly.from_int(b, g_int)
                for v, w in itertools.product(iter_G(b, m), repeat=2):
                    lhs = nu_m(v + w, g, f, m)
                    rhs = digit_add(b, nu_m(v, g, f, m), nu_m(w, g, f, m), m)
                    assert lhs == rhs

    def test_numerator_integer(self):
        f = P(3, 2, 0, 1)
        assert isinstance(nu_numerator(P(3, 1, 2), P(3, 1), f, 2), int)


class TestIrreducible:
    def test_known(self):
        assert is_irreducible(P(2, 1, 1, 1))
        assert not is_irreducible(P(2, 1, 0, 1))  # (x+1)^2
        assert is_irreducible(P(2, 1, 1, 0, 0, 1))
        assert not is_irreducible(P(2, 1))

    def test_smallest(self):
        assert smallest_irreducible(2, 2) == P(2, 1, 1, 1)
        assert smallest_irreducible(2, 4) == P(2, 1, 1, 0, 0, 1)
        assert smallest_irreducible(3, 2) == P(3, 1, 0, 1)
        assert smallest_irreducible(2, 1) == P(2, 0, 1)

    @pytest.mark.parametrize("b,m", [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (3, 1), (3, 2), (3, 3)])
    def test_irreducible_count(self, b, m):
        # number of monic irreducibles of degree m: (1/m) sum_{d | m} mobius(d) b^(m/d)
        mobius = {1: 1, 2: -1, 3: -1, 4: 0, 5: -1}
        expected = sum(mobius[d] * b ** (m // d) for d in range(1, m + 1) if m % d == 0) // m
        count = sum(is_irreducible(FbPoly.from_int(b, b**m + low)) for low in range(b**m))
        assert count == expected

    def test_bad_degree(self):
        with pytest.raises(ParameterError):
            smallest_irreducible(2, 0)


class TestWarnings:
    def test_zero_generator_warns(self):
        with pytest.warns(UserWarning, match="component 2"):
            warn_zero_generators([P(2, 1), P(2)])

    def test_nonzero_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            warn_zero_generators([P(2, 1), P(2, 0, 1)])
