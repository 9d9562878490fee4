from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from apery_lvalues.ball import BallReal
from apery_lvalues.exact import (
    BivariatePoly,
    DataFormatError,
    LcmTable,
    RationalFunction,
    RecurrenceData,
    UniPoly,
    format_recurrence_text,
    lcm_upto,
    parse_recurrence_text,
    poly_eval,
    rational_reconstruct,
)

P0 = BivariatePoly({(4, 1): 432, (4, 0): -512, (3, 1): 624, (3, 0): -672, (2, 1): 144,
                    (2, 0): -88, (1, 1): -76, (1, 0): 96, (0, 1): -7, (0, 0): -6})

rationals = st.fractions(max_denominator=10 ** 6).filter(lambda q: abs(q) < 10 ** 6)
small_polys = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 3)), st.integers(-50, 50), max_size=6
).map(BivariatePoly)


def test_poly_eval_examples():
    assert poly_eval(P0, 0, 1) == -13
    assert poly_eval(BivariatePoly.zero(), 5, Fraction(2, 3)) == 0
    assert poly_eval(BivariatePoly({(1, 1): 1}), 3, Fraction(1, 2)) == Fraction(3, 2)


def test_zero_coefficients_are_dropped():
    P = BivariatePoly({(1, 0): 0, (2, 2): 3})
    assert P.terms == {(2, 2): 3}


@given(small_polys, small_polys, st.integers(-20, 20), rationals)
def test_poly_eval_is_ring_homomorphism(P, Q, n, z):
    assert poly_eval(P + Q, n, z) == poly_eval(P, n, z) + poly_eval(Q, n, z)
    assert poly_eval(P * Q, n, z) == poly_eval(P, n, z) * poly_eval(Q, n, z)


@given(small_polys, rationals, st.integers(-10, 10))
def test_specialize_matches_eval(P, z, n):
    assert P.specialize_z(z)(n) == poly_eval(P, n, z)


@given(rationals, rationals)
def test_rational_field_exactness(a, b):
    assert (a + b) - b == a
    if b:
        assert (a * b) / b == a


@pytest.mark.parametrize("n, d", [(1, 1), (6, 60), (10, 2520)])
def test_lcm_examples(n, d):
    assert lcm_upto(n) == d


def test_lcm_rejects_zero():
    with pytest.raises(ValueError):
        lcm_upto(0)


def test_lcm_table_divisibility():
    D = LcmTable(1000)
    assert D[1] == 1 and D[0] == 1
    for n in range(2, 1001):
        assert D[n] % D[n - 1] == 0
    for n in (17, 100, 999, 1000):
        assert all(D[n] % m == 0 for m in range(1, n + 1))


def test_rational_reconstruct_examples():
    assert rational_reconstruct(BallReal.from_value(Fraction(1, 2), 1e-12, 80), 100) == Fraction(1, 2)
    pi_ball = BallReal.from_value(mpmath.mpf(mpmath.pi), 1e-12, 80)
    assert rational_reconstruct(pi_ball, 10) is None
    x = BallReal.from_value(Fraction(13, 2) + Fraction(1, 10 ** 15), 1e-12, 80)
    assert rational_reconstruct(x, 10) == Fraction(13, 2)


@given(st.integers(-1000, 1000), st.integers(1, 64))
def test_rational_reconstruct_recovers_small_fractions(p, q):
    x = BallReal.from_value(Fraction(p, q) + Fraction(1, 10 ** 20), Fraction(1, 10 ** 18), 128)
    assert rational_reconstruct(x, 64) == Fraction(p, q)


def test_unipoly_arithmetic():
    n = UniPoly.n()
    p = (n + 1) ** 3
    assert p.coeffs == (1, 3, 3, 1)
    q, r = p.divmod(n + 1)
    assert r.is_zero() and q == (n + 1) ** 2
    assert p.shift(1)(0) == 8
    assert UniPoly([2, 4]).gcd(UniPoly([1, 3, 2])) == UniPoly([Fraction(1, 2), 1])


def test_rational_function_normalizes():
    n = UniPoly.n()
    f = RationalFunction((n + 1) * (n + 2), 3 * (n + 1))
    assert f.den == UniPoly([1])
    assert f(4) == 2
    g = f + RationalFunction(UniPoly([1]), n + 2)
    assert g(1) == 1 + Fraction(1, 3)


def test_data_format_round_trip():
    data = RecurrenceData("demo", 2, 1, (BivariatePoly({(3, 0): 1}), BivariatePoly({(0, 0): -2, (1, 1): 5}),
                                         BivariatePoly({(3, 0): 1})))
    again = parse_recurrence_text("# comment\n" + format_recurrence_text(data))
    assert again == data


@pytest.mark.parametrize("text", [
    "coeff 0\n1 0 1\n",
    "recurrence x order 1\ncoeff 0\n0 0 1\n",
    "recurrence x order 1\ncoeff 0\n0 0 1\ncoeff 0\n0 0 1\n",
    "recurrence x order 1\ncoeff 0\n0 0\ncoeff 1\n0 0 1\n",
])
def test_data_format_errors(text):
    with pytest.raises(DataFormatError):
        parse_recurrence_text(text)
