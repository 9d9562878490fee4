"""Tanh-sinh quadrature on (0, 1) and the integrals it is used for.

Nodes are handed to integrands as pairs ``(x, 1 - x)`` computed separately,
so factors such as ``(1 - x)^(-1/2)`` stay accurate at the right endpoint.
Multi-dimensional integrals are nested rules; integrands are curried, one
argument pair per dimension, so outer factors are computed once per node.

Errors are heuristic: the difference between the level-``L`` result and the
level-``L-1`` result obtained from the even nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import mpmath

from .ball import BallReal
from .exact import as_rational

DEFAULT_PREC = 96


class NonFinite(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadratureResult:
    value: mpmath.mpf
    error_estimate: float
    levels_used: int

    def __float__(self) -> float:
        return float(self.value)

    def ball(self, prec: int = 113, safety: float = 10.0) -> BallReal:
        """Heuristic ball: the level difference times ``safety``."""
        rad = max(self.error_estimate * safety, 0.0)
        return BallReal.from_value(self.value, rad, prec)


@lru_cache(maxsize=None)
def _context(prec: int) -> mpmath.MPContext:
    # one context per precision, never mutated after creation
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


@lru_cache(maxsize=64)
def _nodes(level: int, prec: int):
    """Level-``level`` tanh-sinh nodes on (0, 1): list of (x, 1-x, w, even).

    ``w`` already includes the step ``h = 2^-level``.  The rule is truncated
    once ``min(x, 1-x)`` drops below 2^-(2 prec + 20).
    """
    ctx = mpmath.MPContext()
    ctx.prec = prec + 16
    h = ctx.ldexp(1, -level)
    cutoff = ctx.ldexp(1, -(2 * prec + 20))
    half = []
    k = 0
    while True:
        t = k * h
        E = ctx.exp(ctx.pi * ctx.sinh(t))
        xc = 1 / (1 + E)
        x = E / (1 + E)
        w = h * ctx.pi * ctx.cosh(t) * E / (1 + E) ** 2
        half.append((x, xc, w, k % 2 == 0))
        if xc < cutoff:
            break
        k += 1
    nodes = [(xc, x, w, ev) for (x, xc, w, ev) in reversed(half[1:])] + half
    out_ctx = _context(prec)
    return tuple((out_ctx.mpf(x), out_ctx.mpf(xc), out_ctx.mpf(w), ev) for (x, xc, w, ev) in nodes)


def _check(v, ctx):
    if not ctx.isfinite(v):
        raise NonFinite(f"integrand returned {v}")
    return v


def _nested(f, dims: int, level: int, prec: int):
    """(fine, coarse) sums of a curried ``dims``-dimensional integrand."""
    nodes = _nodes(level, prec)
    ctx = nodes[0][0].context
    fine = ctx.zero
    coarse = ctx.zero
    for x, xc, w, even in nodes:
        g = f(x, xc)
        if dims == 1:
            v = _check(g, ctx)
            fine += w * v
            if even:
                coarse += w * v
        else:
            vf, vc = _nested(g, dims - 1, level, prec)
            fine += w * vf
            if even:
                coarse += w * vc
    return fine, 2 * coarse


def _integrate(f, dims: int, levels: int, prec: int) -> QuadratureResult:
    if levels < 1:
        raise ValueError("levels must be >= 1")
    fine, coarse = _nested(f, dims, levels, prec)
    return QuadratureResult(fine, float(abs(fine - coarse)), levels)


def context(prec: int = DEFAULT_PREC) -> mpmath.MPContext:
    """The mpmath context whose numbers integrands receive at ``prec``."""
    return _context(prec)


def tanh_sinh(f: Callable, levels: int = 7, prec: int = DEFAULT_PREC) -> QuadratureResult:
    """Integrate ``f(x, 1-x)`` over (0, 1)."""
    return _integrate(f, 1, levels, prec)


def tanh_sinh_2d(f: Callable, levels: int = 6, prec: int = DEFAULT_PREC, *,
                 corner: bool = False) -> QuadratureResult:
    """Integrate over the unit square; ``f(x, xc)`` returns ``g(y, yc)``.

    With ``corner=True`` the square is cut into quarters at 1/2.  The quarter
    at the origin is cut along its diagonal and each triangle mapped back to
    a square (y = x v below, x = y u above), which removes singularities of
    the form 1/(a x + b y) at the origin; the other quarters keep their
    endpoint singularities on the axes, where tanh-sinh handles them.
    """
    if not corner:
        return _integrate(f, 2, levels, prec)
    ctx = context(prec)
    half = ctx.mpf(1) / 2
    quarter = half / 2

    def lo(t, tc):
        return half * t, half + half * tc

    def hi(t, tc):
        return half + half * t, half * tc

    def rect(xmap, ymap):
        def F(t, tc):
            g = f(*xmap(t, tc))
            return lambda u, uc: quarter * g(*ymap(u, uc))
        return F

    def lower(s, sc):
        x, xc = lo(s, sc)
        g = f(x, xc)
        # y = x v, 1 - y = xc + x vc
        return lambda v, vc: quarter * s * g(x * v, xc + x * vc)

    def upper(s, sc):
        y, yc = lo(s, sc)
        return lambda u, uc: quarter * s * f(y * u, yc + y * uc)(y, yc)

    parts = [_integrate(F, 2, levels, prec) for F in
             (lower, upper, rect(lo, hi), rect(hi, lo), rect(hi, hi))]
    value = ctx.fsum(p.value for p in parts)
    return QuadratureResult(value, sum(p.error_estimate for p in parts), levels)


def tanh_sinh_3d(f: Callable, levels: int = 5, prec: int = DEFAULT_PREC) -> QuadratureResult:
    """Integrate over the unit cube with a twice-curried integrand."""
    return _integrate(f, 3, levels, prec)


# ---------------------------------------------------------------------------
# the integrals


def _mp(ctx, q: Fraction):
    return ctx.mpf(q.numerator) / q.denominator


def integral_J(n: int, z, levels: int = 6, prec: int = DEFAULT_PREC, *, y_outer: bool = False) -> QuadratureResult:
    """J_n(z) as a double integral over the unit square, 0 < z < 1.

    ``y_outer`` swaps the integration order (used as a consistency check).
    """
    z = as_rational(z)
    if not 0 < z < 1 or n < 0:
        raise ValueError("integral_J needs 0 < z < 1 and n >= 0")
    ctx = context(prec)
    zz = _mp(ctx, z)

    def xpart(x, xc):
        return (x * xc) ** n / ctx.sqrt(x * xc)

    def ypart(y, yc):
        return y ** n * yc ** n / ctx.sqrt(y)

    def kernel(t):
        # (1 - z x y)^-(n + 1/2)
        return 1 / (t ** n * ctx.sqrt(t))

    if not y_outer:
        def f(x, xc):
            X = xpart(x, xc)
            zx = zz * x
            return lambda y, yc: X * ypart(y, yc) * kernel(1 - zx * y)
    else:
        def f(y, yc):
            Y = ypart(y, yc)
            zy = zz * y
            return lambda x, xc: Y * xpart(x, xc) * kernel(1 - zy * x)
    return tanh_sinh_2d(f, levels, prec)


def integral_beukers(n: int, levels: int = 4, prec: int = 53) -> QuadratureResult:
    """Beukers' triple integral I_n (with the 1/2 prefactor), n in {0, 1}."""
    if n not in (0, 1):
        raise ValueError("integral_beukers is only provided for n = 0, 1")
    ctx = context(prec)

    def f(x, xc):
        X = (x * xc) ** n

        def g(y, yc):
            XY = X * (y * yc) ** n
            xy = x * y
            return lambda w, wc: XY * (w * wc) ** n / (wc + xy * w) ** (n + 1)
        return g

    res = tanh_sinh_3d(f, levels, prec)
    return QuadratureResult(res.value / 2, res.error_estimate / 2, res.levels_used)


def _check_Z(Z) -> Fraction:
    Z = as_rational(Z)
    if Z < 2:
        raise ValueError("need Z >= 2")
    return Z


def integral_L(n: int, Z, levels: int = 6, prec: int = DEFAULT_PREC) -> QuadratureResult:
    """L_n(Z); sigma_1 = L_0(Z)."""
    Z = _check_Z(Z)
    if n < 0:
        raise ValueError("n must be >= 0")
    ctx = context(prec)
    ZZ = _mp(ctx, Z)

    def f(x, xc):
        X = x ** n * xc ** (2 * n) * ctx.sqrt((1 - x / ZZ) / (x * xc))

        def g(y, yc):
            return X * y ** n * yc ** n / ctx.sqrt(yc) / (x * yc + y * ZZ) ** (n + 1)
        return g

    return tanh_sinh_2d(f, levels, prec, corner=True)


def integral_sigma2(Z, levels: int = 6, prec: int = DEFAULT_PREC) -> QuadratureResult:
    Z = _check_Z(Z)
    ctx = context(prec)
    ZZ = _mp(ctx, Z)

    def f(x, xc):
        X = ctx.sqrt(xc * (1 - x / ZZ) / x)
        return lambda y, yc: X * ctx.sqrt(yc) / (x * yc + y * ZZ)

    return tanh_sinh_2d(f, levels, prec, corner=True)


def rho1_integral(z, levels: int = 7, prec: int = DEFAULT_PREC) -> QuadratureResult:
    z = as_rational(z)
    ctx = context(prec)
    zz = _mp(ctx, z)
    return tanh_sinh(lambda x, xc: 1 / ctx.sqrt(x * xc * (1 - zz * x)), levels, prec)


def rho2_integral(z, levels: int = 7, prec: int = DEFAULT_PREC) -> QuadratureResult:
    z = as_rational(z)
    ctx = context(prec)
    zz = _mp(ctx, z)
    return tanh_sinh(lambda x, xc: ctx.sqrt((1 - zz * x) / (x * xc)), levels, prec)


def f_integral_1d(z, levels: int = 7, prec: int = DEFAULT_PREC) -> QuadratureResult:
    """f(z) = -int x^-1/2 (1-x)^-1/2 log((1 - s)/(1 + s)) dx, s = sqrt(1 - z x)."""
    z = as_rational(z)
    ctx = context(prec)
    zz = _mp(ctx, z)

    def f(x, xc):
        s = ctx.sqrt(1 - zz * x)
        # (1 - s)/(1 + s) = z x / (1 + s)^2 without cancellation
        return -ctx.log(zz * x / (1 + s) ** 2) / ctx.sqrt(x * xc)

    return tanh_sinh(f, levels, prec)


def f_integral_2d(z, levels: int = 6, prec: int = DEFAULT_PREC) -> QuadratureResult:
    """f(z) from the double integral with denominator 1 - (1 - z x) y."""
    z = as_rational(z)
    ctx = context(prec)
    zz = _mp(ctx, z)

    # integrate in s = 1 - y so the singular corner (x, y) = (0, 1) sits at the origin
    def f(x, xc):
        X = ctx.sqrt((1 - zz * x) / (x * xc))
        zx = zz * x
        return lambda s, sc: X / (ctx.sqrt(sc) * (s + zx * sc))

    return tanh_sinh_2d(f, levels, prec, corner=True)


def f_integral_Z(Z, levels: int = 6, prec: int = DEFAULT_PREC) -> QuadratureResult:
    """f(1/Z) from the double integral with denominator x(1-y) + yZ."""
    Z = _check_Z(Z)
    ctx = context(prec)
    ZZ = _mp(ctx, Z)

    def f(x, xc):
        X = ZZ * ctx.sqrt((1 - x / ZZ) / (x * xc))
        return lambda y, yc: X / (ctx.sqrt(yc) * (x * yc + y * ZZ))

    return tanh_sinh_2d(f, levels, prec, corner=True)


def mahler_jensen_integrand(k_squared, prec: int = DEFAULT_PREC):
    """Return (theta_max, g) with mu(k) = (1/pi) int_0^theta_max g(theta) dtheta.

    ``g`` takes (theta, theta_max - theta) and returns log of the larger root
    modulus of Y^2 + (2 cos theta + k) Y + 1, which is 0 at theta_max when
    k < 4.
    """
    k2 = as_rational(k_squared)
    if k2 <= 0 or k2 == 16:
        raise ValueError("need k > 0 and k != 4")
    ctx = context(prec)
    k = ctx.sqrt(_mp(ctx, k2))
    if k2 < 16:
        tmax = ctx.acos((2 - k) / 2)

        def g(th, dth):
            # c - 2 = 2 (cos th - cos tmax) = 4 sin((tmax+th)/2) sin((tmax-th)/2)
            d = 2 * ctx.sin((tmax + th) / 2) * ctx.sin(dth / 2)
            return ctx.log1p(d + ctx.sqrt(d * (d + 2)))
    else:
        tmax = +ctx.pi

        def g(th, dth):
            d = (2 * ctx.cos(th) + k - 2) / 2
            return ctx.log1p(d + ctx.sqrt(d * (d + 2)))
    return tmax, g


def mahler_mu(k_squared, levels: int = 7, prec: int = DEFAULT_PREC) -> QuadratureResult:
    """mu(k) for k = sqrt(k_squared) by Jensen's formula and tanh-sinh in theta."""
    tmax, g = mahler_jensen_integrand(k_squared, prec)
    ctx = context(prec)
    res = tanh_sinh(lambda x, xc: g(tmax * x, tmax * xc), levels, prec)
    scale = tmax / ctx.pi
    return QuadratureResult(res.value * scale, float(res.error_estimate * scale), res.levels_used)
