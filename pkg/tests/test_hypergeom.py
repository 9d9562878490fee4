import random
from fractions import Fraction

import mpmath
import pytest

from apery_lvalues import hypergeom as hg
from apery_lvalues import quadrature as quad
from apery_lvalues.ball import DomainError
from apery_lvalues.hypergeom import HypergeometricSpec, NoConvergence, pfq
from apery_lvalues.sequences import apery_zeta3

HALF = Fraction(1, 2)


def mp(x, prec=256):
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


def test_argument_zero_is_one():
    b = pfq(HypergeometricSpec([HALF, 3], [Fraction(5, 2)], 0), 80)
    assert b.contains(1) and b.rad_fraction() == 0


def test_no_convergence_outside_disc():
    with pytest.raises(NoConvergence):
        pfq(HypergeometricSpec([HALF], [1], 1), 64)


def test_lower_parameter_validation():
    with pytest.raises(ValueError):
        HypergeometricSpec([1], [-2], HALF)


def test_constants_against_mpmath():
    mpmath.mp.prec = 300
    assert hg.pi_val(200).contains(mpmath.pi)
    assert hg.zeta3(200).contains(mpmath.zeta(3))
    assert hg.lambda_val(HALF, 150).contains(2 * mpmath.pi * mpmath.hyp3f2(0.5, 0.5, 0.5, 1, 1.5, 0.5))
    assert hg.rho2(Fraction(-1, 3), 150).contains(mpmath.pi * mpmath.hyp2f1(-0.5, 0.5, 1, mpmath.mpf(-1) / 3))
    mpmath.mp.prec = 53


def test_zeta3_against_apery_quotient():
    u, v = apery_zeta3(30)
    assert hg.zeta3(80).inflate(Fraction(1, 10 ** 10)).contains(u[30] / v[30])


def test_small_z_limits():
    z = Fraction(1, 10 ** 30)
    for fn, target in ((hg.lambda_val, 2), (hg.rho1, 1), (hg.rho2, 1)):
        v = fn(z, 80)
        assert abs(float(v) - target * mpmath.pi) < 1e-25


def test_rho1_against_quadrature():
    res = quad.tanh_sinh(lambda x, xc: 1 / mpmath.sqrt(x * xc * (1 - x / 2)), levels=7, prec=96)
    assert abs(res.value - hg.rho1(HALF, 96).mid) < 1e-15


def test_mu1_series_against_jensen():
    assert abs(float(hg.mahler_mu_series(1, 80)) - float(quad.mahler_mu(1).value)) < 1e-8


def test_f_two_representations():
    assert abs(hg.f_val(HALF, 96).mid - quad.f_integral_1d(HALF).value) < 1e-12


def test_f_small_z():
    z = Fraction(1, 10 ** 12)
    val = hg.f_val(z, 96) + hg.pi_val(96) * hg.log_val(z / 16, 96)
    assert abs(float(val)) < 1e-11


def test_domain_errors():
    for bad in (0, 1, Fraction(3, 2)):
        with pytest.raises(DomainError):
            hg.lambda_val(bad, 64)
    with pytest.raises(DomainError):
        hg.f_val(Fraction(-1, 2), 64)
    with pytest.raises(DomainError):
        hg.mahler_mu_series(16, 64)


def test_precision_containment_random():
    rng = random.Random(20260101)
    fns = (hg.lambda_val, hg.rho1, hg.rho2)
    for i in range(1000):
        q = rng.randint(2, 10 ** 6)
        z = Fraction(rng.randint(-q // 2, q // 2) or 1, q)
        fn = fns[i % 3]
        lo, hi = fn(z, 64), fn(z, 128)
        assert lo.contains(hi), (fn.__name__, z)


def test_contiguous_relation():
    rng = random.Random(5)
    for _ in range(20):
        z = Fraction(rng.randint(-500, 500) or 1, 1000)
        lhs = hg.rho2(z, 100) - hg.rho1(z, 100)
        rhs = -(hg.pi_val(100) * pfq(HypergeometricSpec([HALF, Fraction(3, 2)], [2], z), 100)) * (z / 2)
        assert lhs.overlaps(rhs)


def test_truncation_stability():
    spec = HypergeometricSpec([Fraction(3, 2), Fraction(3, 2), 1, 1], [2, 2, 2], Fraction(16, 25))
    coarse, fine = pfq(spec, 80), pfq(spec, 160)
    assert coarse.contains(fine.mid)
