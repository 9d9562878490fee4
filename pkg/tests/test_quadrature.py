from fractions import Fraction

import mpmath
import pytest

from apery_lvalues import hypergeom as hg
from apery_lvalues import quadrature as quad
from apery_lvalues.sequences import j1_coordinates, j2_coordinates

HALF = Fraction(1, 2)


def combo(coords, z, prec=128):
    a, b, c = coords
    return (hg.lambda_val(z, prec) * a + hg.rho1(z, prec) * b + hg.rho2(z, prec) * c).mid


def test_beta_integral_is_pi():
    res = quad.tanh_sinh(lambda x, xc: 1 / mpmath.sqrt(x * xc), levels=10, prec=64)
    assert abs(res.value - hg.pi_val(64).mid) < 1e-15


def test_rho_integrals():
    assert abs(quad.rho1_integral(HALF).value - hg.rho1(HALF, 96).mid) < 1e-25
    assert abs(quad.rho2_integral(HALF).value - hg.rho2(HALF, 96).mid) < 1e-25


def test_nonfinite_integrand():
    with pytest.raises(quad.NonFinite):
        quad.tanh_sinh(lambda x, xc: mpmath.inf, levels=2, prec=64)


def test_levels_validation():
    with pytest.raises(ValueError):
        quad.tanh_sinh(lambda x, xc: x, levels=0)


def test_integral_J_against_closed_forms():
    J0 = quad.integral_J(0, HALF, levels=4, prec=96)
    J1 = quad.integral_J(1, HALF, levels=4, prec=96)
    J2 = quad.integral_J(2, HALF, levels=4, prec=96)
    assert abs(J0.value - hg.lambda_val(HALF, 96).mid) < 1e-12
    assert abs(J1.value - combo(j1_coordinates(HALF), HALF)) < 1e-10
    assert abs(J2.value - combo(j2_coordinates(HALF), HALF)) < 1e-8


def test_integral_J_order_symmetry():
    a = quad.integral_J(1, Fraction(1, 3), levels=4, prec=96)
    b = quad.integral_J(1, Fraction(1, 3), levels=4, prec=96, y_outer=True)
    assert abs(a.value - b.value) <= 10 * (a.error_estimate + b.error_estimate) + 1e-25


def test_integral_J_domain():
    with pytest.raises(ValueError):
        quad.integral_J(0, 1)


def test_beukers_integrand_positive():
    # the curried integrand at the cube centre, n = 1
    x = y = w = mpmath.mpf(1) / 2
    val = (x * (1 - x)) * (y * (1 - y)) * (w * (1 - w)) / ((1 - w) + x * y * w) ** 2 / 2
    assert mpmath.isfinite(val) and val > 0


def test_f_representations_at_Z4():
    ref = hg.f_val(Fraction(1, 4), 128).mid
    assert abs(quad.f_integral_Z(4, levels=4, prec=96).value - ref) < 1e-8
    assert abs(quad.f_integral_2d(Fraction(1, 4), levels=4, prec=96).value - ref) < 1e-8
    assert abs(quad.f_integral_1d(Fraction(1, 4)).value - ref) < 1e-12


def test_sigma1_is_L0():
    # L_0(Z) and the Z-form of f share their integrand up to the factor Z
    s1 = quad.integral_L(0, 4, levels=4, prec=96)
    assert abs(s1.value - (hg.f_val(Fraction(1, 4), 128) / 4).mid) < 1e-20


def test_integral_L_domain():
    with pytest.raises(ValueError):
        quad.integral_L(0, 1)
    with pytest.raises(ValueError):
        quad.integral_sigma2(Fraction(3, 2))


@pytest.mark.parametrize("k2", [1, 4, 9, 2, 8])
def test_mahler_small_k(k2):
    assert abs(quad.mahler_mu(k2).value - hg.mahler_mu_series(k2, 96).mid) < 1e-8


def test_mahler_large_k():
    f = hg.f_val(Fraction(16, 25), 96).mid / (2 * hg.pi_val(96).mid)
    assert abs(quad.mahler_mu(25).value - f) < 1e-8


def test_mahler_small_k_monotone():
    vals = [quad.mahler_mu(Fraction(1, q)).value for q in (4, 16, 64)]
    assert vals[0] > vals[1] > vals[2] > 0


def test_jensen_integrand_vanishes_at_split():
    for k2 in (1, 2, 9):
        tmax, g = quad.mahler_jensen_integrand(k2)
        assert abs(g(tmax, 0 * tmax)) < 1e-12
        eps = mpmath.mpf(10) ** -14
        assert abs(g(tmax - eps, eps)) < 1e-6


def test_level_monotonicity():
    ctx = quad.context(128)
    z = ctx.mpf(1) / 3
    cases = [
        (1, lambda x, xc: 1 / ctx.sqrt(x * xc * (1 - z * x))),
        (1, lambda x, xc: ctx.log(1 + x) / ctx.sqrt(xc)),
    ]
    for dims, f in cases:
        vals = [quad.tanh_sinh(f, levels=L, prec=128).value for L in range(3, 8)]
        diffs = [abs(vals[i + 1] - vals[i]) for i in range(len(vals) - 1)]
        assert all(diffs[i + 1] < diffs[i] for i in range(len(diffs) - 1) if diffs[i] > 1e-35)
    vals = [quad.integral_J(0, HALF, levels=L, prec=128).value for L in range(2, 6)]
    diffs = [abs(vals[i + 1] - vals[i]) for i in range(len(vals) - 1)]
    assert diffs[2] < diffs[1] < diffs[0]


def test_result_ball():
    res = quad.rho1_integral(HALF)
    assert res.ball(96).contains(hg.rho1(HALF, 96).mid)
