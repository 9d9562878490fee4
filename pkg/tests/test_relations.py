import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from apery_lvalues import hypergeom as hg
from apery_lvalues import quadrature as qd
from apery_lvalues.relations import (
    InsufficientPrecision,
    find_relation,
    normalize_relation,
    required_precision,
)


def planted_case(rng, ctx):
    n = rng.randint(3, 5)
    xs = [ctx.mpf(rng.random()) + ctx.mpf(rng.getrandbits(150)) / 2 ** 150 for _ in range(n - 1)]
    while True:
        c = [rng.randint(-20, 20) for _ in range(n)]
        if c[-1] != 0 and any(c[:-1]):
            break
    last = -ctx.fsum(ci * x for ci, x in zip(c, xs)) / c[-1]
    return xs + [last], c


def is_multiple(found, planted):
    # the relation lattice of n-1 independent values plus one dependent is rank one
    k = next(i for i, v in enumerate(planted) if v)
    return all(f * planted[k] == p * found[k] for f, p in zip(found, planted))


def test_golden_ratio():
    with mpmath.workprec(200):
        phi = (1 + mpmath.sqrt(5)) / 2
        r = find_relation([1, phi, phi ** 2], 1000, 200)
    assert r.coefficients == [1, 1, -1]


def test_planted_suite():
    rng = random.Random(2024)
    ctx = mpmath.MPContext()
    ctx.dps = 45
    hits = 0
    for _ in range(100):
        xs, c = planted_case(rng, ctx)
        r = find_relation([ctx.nstr(x, 45) for x in xs], 100, 133)
        hits += r.found and is_multiple(r.coefficients, c)
    assert hits == 100


def test_no_relation_pi():
    r = find_relation([1, hg.pi_val(200)], 10 ** 6, 200)
    assert not r.found
    assert r.norm_bound > 10 ** 6


def test_precision_precondition():
    assert required_precision(4, 10 ** 6) == 224
    with pytest.raises(InsufficientPrecision):
        find_relation([1, 2, 3, 4], 10 ** 6, 128)


def test_normalize():
    assert normalize_relation([-4, 6, 0]) == [2, -3, 0]
    assert normalize_relation([0, -3, 9]) == [0, 1, -3]
    with pytest.raises(ValueError):
        normalize_relation([0, 0])


def test_zero_entry():
    assert find_relation([Fraction(1, 3), 0, Fraction(2, 7)], 100, 200).coefficients == [0, 1, 0]


@given(st.lists(st.integers(-30, 30), min_size=3, max_size=4).filter(lambda c: c[-1] != 0 and any(c[:-1])),
       st.integers(0, 2 ** 32))
def test_precision_doubling_invariant(c, seed):
    rng = random.Random(seed)
    ctx = mpmath.MPContext()
    ctx.prec = 400
    xs = [ctx.mpf(rng.getrandbits(390)) / 2 ** 390 + 1 for _ in range(len(c) - 1)]
    xs.append(-ctx.fsum(ci * x for ci, x in zip(c, xs)) / c[-1])
    r1 = find_relation(xs, 100, 160)
    r2 = find_relation(xs, 100, 320)
    assert r1.coefficients == r2.coefficients == normalize_relation(c)


def test_j1_coordinates_recovered():
    z = Fraction(1, 2)
    j1 = qd.integral_J(1, z, 5, 128)
    assert j1.error_estimate < 1e-30
    vals = [j1.value, hg.lambda_val(z, 160).mid, hg.rho1(z, 160).mid, hg.rho2(z, 160).mid]
    r = find_relation(vals, 1000, 160)
    # J_1 = a_1 lambda + b_1 rho_1 + c_1 rho_2 with (a_1, b_1, c_1) = (-5, -10, 26)
    assert r.coefficients == [1, 5, 10, -26]


def test_l_family_relation_z4():
    # recorded experiment: L_1, rho_1, rho_2, sigma_1, sigma_2 at Z = 4 are dependent
    prec = 192
    vals = [qd.integral_L(1, 4, 4, prec).value, hg.rho1(Fraction(1, 4), prec).mid,
            hg.rho2(Fraction(1, 4), prec).mid, (hg.f_val(Fraction(1, 4), prec) / 4).mid,
            qd.integral_sigma2(4, 4, prec).value]
    r = find_relation(vals, 2000, prec)
    assert r.coefficients == [96, -399, 284, 654, -1224]
