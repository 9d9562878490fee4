"""Certified evaluation of hypergeometric series and the constants built on them.

Series are summed in binary fixed point with exact rational term ratios, so
each term carries an explicit integer error bound; the tail is bounded
geometrically once the term ratio is provably below 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ball import BallReal, DomainError
from .exact import as_rational

GUARD_BITS = 20
MAX_TERMS = 2_000_000


class NoConvergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class HypergeometricSpec:
    upper: tuple[Fraction, ...]
    lower: tuple[Fraction, ...]
    argument: Fraction

    def __init__(self, upper: Sequence, lower: Sequence, argument):
        object.__setattr__(self, "upper", tuple(as_rational(a) for a in upper))
        object.__setattr__(self, "lower", tuple(as_rational(b) for b in lower))
        object.__setattr__(self, "argument", as_rational(argument))
        for b in self.lower:
            if b <= 0 and b.denominator == 1:
                raise ValueError(f"lower parameter {b} is a nonpositive integer")

    def ratio(self, k: int) -> Fraction:
        """t_{k+1} / t_k."""
        r = self.argument / (k + 1)
        for a in self.upper:
            r *= a + k
        for b in self.lower:
            r /= b + k
        return r

    def ratio_bound(self, m: int) -> Fraction | None:
        """An upper bound for |t_{k+1}/t_k| valid for every k >= m, or None.

        Upper parameters are paired with lower ones (including the implicit
        1 from k!); each factor (a+k)/(b+k) is monotone for k >= m once both
        a+m and b+m are positive, so its sup is max(value at m, 1).
        """
        ups = sorted(self.upper)
        lows = sorted(self.lower + (Fraction(1),))
        if len(ups) > len(lows):
            return None
        bound = abs(self.argument)
        for i, b in enumerate(lows):
            if b + m <= 0:
                return None
            if i < len(ups):
                a = ups[i]
                if a + m <= 0:
                    return None
                bound *= max(Fraction(1), (a + m) / (b + m))
            else:
                bound *= max(Fraction(0), 1 / (b + m))
        return bound


def _fixed_sum(spec: HypergeometricSpec, target_bits: int) -> tuple[int, int, int]:
    """Sum the series to absolute error 2^-target_bits.

    Returns (S, E, wp): the sum is within E * 2^-wp of S * 2^-wp.
    """
    z = spec.argument
    if z == 0:
        return 1, 0, 0
    if abs(z) >= 1:
        raise NoConvergence(f"|argument| = {float(abs(z))} >= 1")
    est_terms = int(target_bits / max(-math.log2(float(abs(z))), 1e-9)) + 16
    wp = target_bits + GUARD_BITS + est_terms.bit_length()
    one = 1 << wp
    T, e = one, 0  # current term and its error bound, both scaled by 2^wp
    S, E = 0, 0
    eps = 1 << (wp - target_bits - 2)
    k = 0
    while True:
        S += T
        E += e
        r = spec.ratio(k)
        if r == 0:
            return S, E, wp
        T = (T * r.numerator) // r.denominator
        e = math.ceil(e * abs(r)) + 1
        k += 1
        if k > MAX_TERMS:
            raise NoConvergence("term budget exhausted")
        rb = spec.ratio_bound(k)
        if rb is not None and rb < 1:
            # |sum_{j>=k} t_j| <= |t_k| / (1 - rb); |t_k| <= (|T| + e) 2^-wp
            tail = math.ceil((abs(T) + e) / (1 - rb))
            if tail <= eps:
                return S, E + tail, wp


def pfq(spec: HypergeometricSpec, prec: int = 113) -> BallReal:
    """Certified ball for the generalized hypergeometric series at ``prec`` bits."""
    S, E, wp = _fixed_sum(spec, prec + 4)
    if wp == 0:
        return BallReal.exact(1, prec)
    return BallReal.from_fixed(S, E, wp, prec + GUARD_BITS)


# ---------------------------------------------------------------------------
# constants


def _arctan_inv(k: int, wp: int) -> tuple[int, int]:
    """arctan(1/k) * 2^wp as (value, error bound)."""
    power = (1 << wp) // k
    k2 = k * k
    total, j, terms = 0, 0, 0
    while power:
        term = power // (2 * j + 1)
        total += -term if j % 2 else term
        power //= k2
        j += 1
        terms += 1
    # each term floors once (<1), alternating tail below the first omitted term (<1)
    return total, terms + 1


def pi_val(prec: int = 113) -> BallReal:
    """pi from Machin's formula 16 atan(1/5) - 4 atan(1/239)."""
    wp = prec + GUARD_BITS + 10
    a, ea = _arctan_inv(5, wp)
    b, eb = _arctan_inv(239, wp)
    return BallReal.from_fixed(16 * a - 4 * b, 16 * ea + 4 * eb, wp, prec + GUARD_BITS)


def zeta3(prec: int = 113) -> BallReal:
    """zeta(3) = (5/2) sum_{n>=1} (-1)^(n+1) / (n^3 binom(2n, n)).

    Alternating with decreasing terms, so the tail is below the first
    omitted term.
    """
    wp = prec + GUARD_BITS + 10
    one = 1 << wp
    total, terms = 0, 0
    n, binom = 1, 2
    while True:
        t = one // (n ** 3 * binom)
        if t == 0:
            break
        total += t if n % 2 else -t
        terms += 1
        binom = binom * (2 * n + 1) * (2 * n + 2) // ((n + 1) ** 2)
        n += 1
    # 5/2 * (total +- (terms + 1)), halving exactly by shifting wp
    return BallReal.from_fixed(5 * total, 5 * (terms + 1), wp + 1, prec + GUARD_BITS)


def _ball(x, prec: int) -> BallReal:
    return x if isinstance(x, BallReal) else BallReal.exact(as_rational(x) if not isinstance(x, float) else x, prec + GUARD_BITS)


def sqrt_val(x, prec: int = 113) -> BallReal:
    return _ball(x, prec).with_prec(prec + GUARD_BITS).sqrt()


def log_val(x, prec: int = 113) -> BallReal:
    return _ball(x, prec).with_prec(prec + GUARD_BITS).log()


def exp_val(x, prec: int = 113) -> BallReal:
    return _ball(x, prec).with_prec(prec + GUARD_BITS).exp()


# ---------------------------------------------------------------------------
# the analytic constants of the J family

HALF = Fraction(1, 2)


def _check_z(z) -> Fraction:
    z = as_rational(z)
    if z == 0 or abs(z) >= 1:
        raise DomainError(f"need 0 < |z| < 1, got {z}")
    return z


def lambda_val(z, prec: int = 113) -> BallReal:
    """lambda(z) = 2 pi 3F2(1/2, 1/2, 1/2; 1, 3/2; z)."""
    z = _check_z(z)
    F = pfq(HypergeometricSpec([HALF, HALF, HALF], [1, Fraction(3, 2)], z), prec)
    return 2 * pi_val(prec) * F


def rho1(z, prec: int = 113) -> BallReal:
    """rho_1(z) = pi 2F1(1/2, 1/2; 1; z)."""
    z = _check_z(z)
    return pi_val(prec) * pfq(HypergeometricSpec([HALF, HALF], [1], z), prec)


def rho2(z, prec: int = 113) -> BallReal:
    """rho_2(z) = pi 2F1(-1/2, 1/2; 1; z)."""
    z = _check_z(z)
    return pi_val(prec) * pfq(HypergeometricSpec([-HALF, HALF], [1], z), prec)


def f_val(z, prec: int = 113) -> BallReal:
    """f(z) = -pi (log(z/16) + (z/4) 4F3(3/2, 3/2, 1, 1; 2, 2, 2; z)), 0 < z < 1."""
    z = as_rational(z)
    if not 0 < z < 1:
        raise DomainError(f"f needs 0 < z < 1, got {z}")
    F = pfq(HypergeometricSpec([Fraction(3, 2), Fraction(3, 2), 1, 1], [2, 2, 2], z), prec)
    return -pi_val(prec) * (log_val(z / 16, prec) + F * (z / 4))


def mahler_mu_series(k_squared, prec: int = 113) -> BallReal:
    """mu(k) for k = sqrt(k_squared) > 0, k != 4, from the series formulas.

    For 0 < k < 4: (k/4) 3F2(1/2,1/2,1/2; 1,3/2; k^2/16); for k > 4:
    f(16/k^2) / (2 pi).
    """
    k2 = as_rational(k_squared)
    if k2 <= 0 or k2 == 16:
        raise DomainError("need k > 0 and k != 4")
    if k2 < 16:
        F = pfq(HypergeometricSpec([HALF, HALF, HALF], [1, Fraction(3, 2)], k2 / 16), prec)
        return sqrt_val(k2, prec) * F / 4
    return f_val(16 / k2, prec) / (2 * pi_val(prec))
