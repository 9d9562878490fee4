"""Midpoint-radius real balls.

A :class:`BallReal` stores a binary floating-point midpoint and a nonnegative
radius, both as raw ``mpmath.libmp`` tuples.  Every operation rounds the
midpoint to nearest at the working precision and folds that rounding error,
plus the propagated input radii, into an upward-rounded radius.  Precision is
carried by each ball; there is no global precision state.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
from mpmath import libmp
from mpmath.libmp import (
    fzero,
    from_int,
    from_man_exp,
    from_rational,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_exp,
    mpf_log,
    mpf_mul,
    mpf_neg,
    mpf_sqrt,
    mpf_sub,
    round_down,
    round_nearest,
    round_up,
    to_float,
    to_rational,
    to_str,
)

# precision of radius arithmetic; radii are always rounded away from zero
RAD_PREC = 32
# padding, in ulps, for elementary functions from libmp (which are not
# guaranteed correctly rounded)
_TRANSC_ULPS = 4


class DomainError(ArithmeticError):
    """Function applied to a ball not contained in its domain."""


def _ulp(x, prec: int):
    """Upper bound for the round-to-nearest error of ``x`` at ``prec`` bits."""
    if x == fzero:
        return fzero
    sign, man, exp, bc = x
    return from_man_exp(1, exp + bc - prec)


def _radd(*xs):
    acc = fzero
    for x in xs:
        acc = mpf_add(acc, x, RAD_PREC, round_up)
    return acc


def _rmul(a, b):
    return mpf_mul(a, b, RAD_PREC, round_up)


def _rdiv(a, b):
    return mpf_div(a, b, RAD_PREC, round_up)


def _to_raw(x, prec: int):
    """Raw mpf for an int/Fraction/float, plus the conversion error bound."""
    if isinstance(x, int):
        v = from_int(x, prec, round_nearest)
        return v, (fzero if to_rational(v) == (x, 1) else _ulp(v, prec))
    if isinstance(x, Fraction):
        v = from_rational(x.numerator, x.denominator, prec, round_nearest)
        p, q = to_rational(v)
        return v, (fzero if Fraction(p, q) == x else _ulp(v, prec))
    if isinstance(x, float):
        return libmp.from_float(x), fzero
    if hasattr(x, "_mpf_"):
        return x._mpf_, fzero
    raise TypeError(f"cannot build a ball from {type(x).__name__}")


class BallReal:
    __slots__ = ("_mid", "_rad", "prec")

    def __init__(self, mid, rad=fzero, prec: int = 53):
        self._mid = mid
        self._rad = rad
        self.prec = int(prec)
        if mpf_cmp(rad, fzero) < 0:
            raise ValueError("ball radius must be nonnegative")

    # -- construction -----------------------------------------------------

    @classmethod
    def exact(cls, x, prec: int = 53) -> "BallReal":
        """Ball around an exact int/Fraction (radius covers the rounding)."""
        mid, err = _to_raw(x, prec)
        return cls(mid, err, prec)

    @classmethod
    def from_value(cls, mid, rad=0, prec: int = 53) -> "BallReal":
        """Ball from a midpoint (number or decimal string) and a radius."""
        if isinstance(mid, str):
            m = libmp.from_str(mid, prec, round_nearest)
            merr = _ulp(m, prec)
        else:
            m, merr = _to_raw(mid, prec)
        if isinstance(rad, str):
            r = libmp.from_str(rad, RAD_PREC, round_up)
        elif isinstance(rad, Fraction):
            r = from_rational(rad.numerator, rad.denominator, RAD_PREC, round_up)
        elif hasattr(rad, "_mpf_"):
            r = mpf_abs(rad._mpf_)
        else:
            r = libmp.from_float(abs(float(rad)), RAD_PREC, round_up)
        return cls(m, _radd(r, merr), prec)

    @classmethod
    def from_fixed(cls, man: int, err: int, wp: int, prec: int | None = None) -> "BallReal":
        """Ball for ``man * 2**-wp`` with absolute error at most ``err * 2**-wp``."""
        prec = wp if prec is None else prec
        exact = from_man_exp(man, -wp)
        mid = libmp.normalize(*exact[:3], exact[3], prec, round_nearest) if exact != fzero else fzero
        rad = _radd(from_man_exp(abs(err), -wp), mpf_abs(mpf_sub(exact, mid)))
        return cls(mid, rad, prec)

    # -- inspection -------------------------------------------------------

    @property
    def mid(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._mid)

    @property
    def rad(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._rad)

    def mid_fraction(self) -> Fraction:
        p, q = to_rational(self._mid)
        return Fraction(p, q)

    def rad_fraction(self) -> Fraction:
        p, q = to_rational(self._rad)
        return Fraction(p, q)

    def lower(self) -> Fraction:
        return self.mid_fraction() - self.rad_fraction()

    def upper(self) -> Fraction:
        return self.mid_fraction() + self.rad_fraction()

    def __float__(self) -> float:
        return to_float(self._mid)

    def radius_float(self) -> float:
        return to_float(self._rad, rnd=round_up)

    def rel_accuracy_bits(self) -> float:
        """log2(|mid| / rad); inf for exact balls."""
        if self._rad == fzero:
            return float("inf")
        if self._mid == fzero:
            return float("-inf")
        return float(mpmath.log(abs(self.mid) / self.rad, 2))

    def contains(self, x) -> bool:
        """True if the exact number or whole ball ``x`` lies inside this ball."""
        if isinstance(x, BallReal):
            return self.lower() <= x.lower() and x.upper() <= self.upper()
        if isinstance(x, float):
            x = Fraction(x)
        elif hasattr(x, "_mpf_"):
            x = Fraction(*to_rational(x._mpf_))
        x = Fraction(x)
        return abs(x - self.mid_fraction()) <= self.rad_fraction()

    def overlaps(self, other: "BallReal") -> bool:
        return not (self.upper() < other.lower() or other.upper() < self.lower())

    def contains_zero(self) -> bool:
        return self.contains(0)

    def __repr__(self) -> str:
        digits = max(5, int(self.prec * 0.30103))
        return f"[{to_str(self._mid, digits)} +/- {to_str(self._rad, 5)}]"

    def to_json(self) -> dict:
        digits = max(5, int(self.prec * 0.30103) + 2)
        return {"midpoint": to_str(self._mid, digits), "radius": to_str(self._rad, 8)}

    def with_prec(self, prec: int) -> "BallReal":
        return BallReal(self._mid, self._rad, prec)

    def inflate(self, extra) -> "BallReal":
        if isinstance(extra, float):
            r = libmp.from_float(abs(extra), RAD_PREC, round_up)
        else:
            e = abs(Fraction(extra))
            r = from_rational(e.numerator, e.denominator, RAD_PREC, round_up)
        return BallReal(self._mid, _radd(self._rad, r), self.prec)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "BallReal":
        if isinstance(other, BallReal):
            return other
        return BallReal.exact(other, self.prec)

    def __neg__(self) -> "BallReal":
        return BallReal(mpf_neg(self._mid), self._rad, self.prec)

    def __pos__(self) -> "BallReal":
        return self

    def __abs__(self) -> "BallReal":
        if self.contains_zero():
            up = max(abs(self.lower()), abs(self.upper()))
            half = up / 2
            return BallReal.from_value(half, half, self.prec)
        return -self if mpf_cmp(self._mid, fzero) < 0 else self

    def __add__(self, other) -> "BallReal":
        other = self._coerce(other)
        prec = max(self.prec, other.prec)
        mid = mpf_add(self._mid, other._mid, prec, round_nearest)
        return BallReal(mid, _radd(self._rad, other._rad, _ulp(mid, prec)), prec)

    __radd__ = __add__

    def __sub__(self, other) -> "BallReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "BallReal":
        return self._coerce(other) - self

    def __mul__(self, other) -> "BallReal":
        other = self._coerce(other)
        prec = max(self.prec, other.prec)
        mid = mpf_mul(self._mid, other._mid, prec, round_nearest)
        rad = _radd(
            _rmul(mpf_abs(self._mid), other._rad),
            _rmul(mpf_abs(other._mid), self._rad),
            _rmul(self._rad, other._rad),
            _ulp(mid, prec),
        )
        return BallReal(mid, rad, prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "BallReal":
        other = self._coerce(other)
        prec = max(self.prec, other.prec)
        bm = mpf_abs(other._mid)
        gap = mpf_sub(bm, other._rad, RAD_PREC, round_down)
        if mpf_cmp(gap, fzero) <= 0:
            raise ZeroDivisionError("division by a ball containing zero")
        mid = mpf_div(self._mid, other._mid, prec, round_nearest)
        num = _radd(_rmul(mpf_abs(self._mid), other._rad), _rmul(bm, self._rad))
        den = mpf_mul(bm, gap, RAD_PREC, round_down)
        return BallReal(mid, _radd(_rdiv(num, den), _ulp(mid, prec)), prec)

    def __rtruediv__(self, other) -> "BallReal":
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "BallReal":
        if not isinstance(k, int) or k < 0:
            raise TypeError("only nonnegative integer powers are supported")
        out = BallReal.exact(1, self.prec)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- elementary functions --------------------------------------------

    def _positive_lower(self, what: str):
        lo = mpf_sub(self._mid, self._rad, RAD_PREC, round_down)
        if mpf_cmp(lo, fzero) <= 0:
            raise DomainError(f"{what} of a ball not strictly positive: {self!r}")
        return lo

    def sqrt(self) -> "BallReal":
        if self._rad == fzero and self._mid == fzero:
            return self
        lo = self._positive_lower("sqrt")
        mid = mpf_sqrt(self._mid, self.prec, round_nearest)
        slo = mpf_sqrt(lo, RAD_PREC, round_down)
        rad = _radd(_rdiv(self._rad, slo), _rmul(from_int(_TRANSC_ULPS), _ulp(mid, self.prec)))
        return BallReal(mid, rad, self.prec)

    def log(self) -> "BallReal":
        lo = self._positive_lower("log")
        mid = mpf_log(self._mid, self.prec, round_nearest)
        rad = _radd(_rdiv(self._rad, lo), _rmul(from_int(_TRANSC_ULPS), _ulp(mid, self.prec)))
        return BallReal(mid, rad, self.prec)

    def exp(self) -> "BallReal":
        mid = mpf_exp(self._mid, self.prec, round_nearest)
        hi = mpf_exp(mpf_add(self._mid, self._rad, RAD_PREC, round_up), RAD_PREC, round_up)
        rad = _radd(_rmul(hi, self._rad), _rmul(from_int(_TRANSC_ULPS), _ulp(mid, self.prec)))
        return BallReal(mid, rad, self.prec)
