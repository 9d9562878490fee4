"""L-values of the elliptic curves attached to mu(k).

Point counts give a_p; Hecke recursions give a_n; L(E, 1) and L(E, 2) come
from the smoothed series obtained by splitting the Mellin integral of the
weight-2 form at y = t (and 1/t) and using the Fricke symmetry with sign
epsilon:

    Lambda(s) = sum_n a_n [ (sqrt(N)/(2 pi n))^s       Gamma(s,   x_n t)
                          + eps (sqrt(N)/(2 pi n))^(2-s) Gamma(2-s, x_n / t) ],

with x_n = 2 pi n / sqrt(N) and Lambda(s) = (sqrt(N)/(2 pi))^s Gamma(s) L(s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import mpmath

from .ball import BallReal
from .exact import rational_reconstruct
from . import hypergeom


class Ambiguous(ArithmeticError):
    """The functional-equation sign could not be decided."""


@dataclass(frozen=True)
class CurveModel:
    label: str
    k_squared: int
    weierstrass: tuple[int, int, int, int, int]
    conductor: int

    @property
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.weierstrass
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def bad_primes(self) -> list[int]:
        return prime_factors(abs(self.discriminant))

    def validate(self) -> None:
        if self.discriminant == 0:
            raise ValueError(f"{self.label}: singular model")
        if prime_factors(self.conductor) != self.bad_primes():
            raise ValueError(f"{self.label}: conductor {self.conductor} does not match "
                             f"bad primes {self.bad_primes()}")


def prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def parse_curves(text: str) -> dict[str, CurveModel]:
    curves = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) != 8:
            raise ValueError(f"bad curve record: {line!r}")
        c = CurveModel(tok[0], int(tok[1]), tuple(int(t) for t in tok[2:7]), int(tok[7]))
        c.validate()
        curves[c.label] = c
    return curves


@lru_cache(maxsize=1)
def load_curves() -> dict[str, CurveModel]:
    text = resources.files("apery_lvalues.data").joinpath("curves.txt").read_text(encoding="utf-8")
    return parse_curves(text)


def curve_for_k_squared(k_squared: int) -> CurveModel:
    for c in load_curves().values():
        if c.k_squared == k_squared:
            return c
    raise KeyError(f"no curve recorded for k^2 = {k_squared}")


# ---------------------------------------------------------------------------
# point counting


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(sieve[p * p::p]))
    return [i for i, v in enumerate(sieve) if v]


def ap(curve: CurveModel, p: int) -> int:
    """p + 1 - #E(F_p) on the given (minimal) model, by a loop over x."""
    a1, a2, a3, a4, a6 = curve.weierstrass
    if p == 2:
        return ap_naive(curve, p)
    squares = [0] * p
    for y in range(p):
        squares[y * y % p] += 1
    affine = 0
    for x in range(p):
        # y^2 + (a1 x + a3) y = x^3 + a2 x^2 + a4 x + a6; complete the square
        b = a1 * x + a3
        rhs = ((x + a2) * x + a4) * x + a6
        affine += squares[(b * b + 4 * rhs) % p]
    return p - affine


def ap_naive(curve: CurveModel, p: int) -> int:
    """Same quantity by testing every (x, y) pair."""
    a1, a2, a3, a4, a6 = curve.weierstrass
    affine = 0
    for x in range(p):
        rhs = (((x + a2) * x + a4) * x + a6) % p
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - rhs) % p == 0:
                affine += 1
    return p - affine


@dataclass
class HeckeCoefficients:
    curve: CurveModel
    a: list[int]  # a[0] unused, a[1] = 1

    def __getitem__(self, n: int) -> int:
        return self.a[n]

    @property
    def horizon(self) -> int:
        return len(self.a) - 1


def hecke_coeffs(curve: CurveModel, M: int) -> HeckeCoefficients:
    """a_1..a_M from a_p by multiplicativity and the prime-power recursions."""
    if M < 1:
        raise ValueError("M must be >= 1")
    bad = set(curve.bad_primes())
    a = [0] * (M + 1)
    a[1] = 1
    spf = list(range(M + 1))  # smallest prime factor
    for p in range(2, math.isqrt(M) + 1):
        if spf[p] == p:
            for m in range(p * p, M + 1, p):
                if spf[m] == m:
                    spf[m] = p
    for p in primes_upto(M):
        t = ap(curve, p)
        if p not in bad and t * t > 4 * p:
            raise AssertionError(f"Hasse bound violated: a_{p} = {t}")
        prev, cur = 1, t
        q = p
        while q <= M:
            a[q] = cur
            if p in bad:
                prev, cur = cur, cur * t
            else:
                prev, cur = cur, t * cur - p * prev
            q *= p
    for n in range(2, M + 1):
        p = spf[n]
        q = p
        m = n // p
        while m % p == 0:
            m //= p
            q *= p
        if m > 1:
            a[n] = a[q] * a[m]
    return HeckeCoefficients(curve, a)


def chi_minus4(n: int) -> int:
    return 0 if n % 2 == 0 else (1 if n % 4 == 1 else -1)


# ---------------------------------------------------------------------------
# smoothed L-series


def _ctx(prec: int) -> mpmath.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


def horizon_for(conductor: int, prec: int, t: float = 1.0) -> int:
    """Number of coefficients after which the tail is below 2^-(prec+10).

    Uses |a_n| <= d(n) sqrt(n) <= 2n and Gamma(s, x) <= (1+x) e^-x for the
    weights, with the slower of the two decay rates x_n t and x_n / t.
    """
    c = 2 * math.pi / math.sqrt(conductor) * min(t, 1 / t)
    target = (prec + 10) * math.log(2)
    M = 1
    while True:
        # sum_{n>M} 2n (1 + c n) e^{-c n}, bounded by a geometric tail
        m = M + 1
        head = 2 * m * (1 + c * m) * math.exp(-c * m)
        ratio = math.exp(-c) * ((m + 1) / m) ** 2
        if ratio < 1 and head / (1 - ratio) < math.exp(-target):
            return M
        M += 1


@dataclass
class LSeries:
    """Dirichlet coefficients a_1..a_M of a weight-2 newform of level N."""

    coeffs: list[int]
    conductor: int
    name: str = ""

    def lambda2(self, eps: int, t, prec: int):
        """Lambda(2) computed with the split point t (mpmath value)."""
        ctx = _ctx(prec + 20)
        t = ctx.mpf(t)
        sq = ctx.sqrt(self.conductor)
        total = ctx.zero
        for n in range(1, len(self.coeffs)):
            an = self.coeffs[n]
            if not an:
                continue
            x = 2 * ctx.pi * n / sq
            xt = x * t
            first = (sq / (2 * ctx.pi * n)) ** 2 * (1 + xt) * ctx.exp(-xt)
            second = eps * ctx.e1(x / t)
            total += an * (first + second)
        return total

    def value(self, s: int, eps: int, prec: int, t=1):
        """L(s) for s in {1, 2}."""
        ctx = _ctx(prec + 20)
        t = ctx.mpf(t)
        sq = ctx.sqrt(self.conductor)
        if s == 1:
            if eps == -1:
                # Lambda(1) = -Lambda(1)
                return ctx.zero
            total = ctx.zero
            for n in range(1, len(self.coeffs)):
                an = self.coeffs[n]
                if an:
                    x = 2 * ctx.pi * n / sq
                    total += ctx.mpf(an) / n * (ctx.exp(-x * t) + eps * ctx.exp(-x / t))
            return total
        if s == 2:
            return self.lambda2(eps, t, prec) * (2 * ctx.pi / sq) ** 2
        raise ValueError("only s = 1 and s = 2 are supported")

    def sign(self, prec: int, t: float = 1.2) -> int:
        """The epsilon for which Lambda(2) is independent of the split point.

        At s = 1 the t <-> 1/t comparison is symmetric by construction, so the
        test is done at s = 2.
        """
        ctx = _ctx(prec + 20)
        tol = ctx.ldexp(1, -(prec // 2))
        ok = []
        for eps in (1, -1):
            a = self.lambda2(eps, t, prec)
            b = self.lambda2(eps, 1 / ctx.mpf(t), prec)
            rel = abs(a - b) / max(abs(a), abs(b), ctx.ldexp(1, -prec))
            if rel < tol:
                ok.append(eps)
        if len(ok) != 1:
            raise Ambiguous(f"{self.name}: consistent signs {ok} at t={t}")
        return ok[0]

    def split_disagreement(self, eps: int, prec: int, t: float = 1.2) -> float:
        ctx = _ctx(prec + 20)
        a = self.lambda2(eps, t, prec)
        b = self.lambda2(eps, 1 / ctx.mpf(t), prec)
        return float(abs(a - b) / max(abs(a), abs(b)))


def curve_lseries(curve: CurveModel, prec: int, t: float = 1.2, M: int | None = None) -> LSeries:
    M = horizon_for(curve.conductor, prec, t) if M is None else M
    return LSeries(hecke_coeffs(curve, M).a, curve.conductor, curve.label)


def twisted_lseries(curve: CurveModel, prec: int, t: float = 1.2, M: int | None = None) -> LSeries:
    """The chi_{-4} twist; needs odd conductor, giving level 16 N."""
    if curve.conductor % 2 == 0:
        raise ValueError("chi_{-4} twist implemented for odd conductor only")
    N = 16 * curve.conductor
    M = horizon_for(N, prec, t) if M is None else M
    a = hecke_coeffs(curve, M).a
    return LSeries([chi_minus4(n) * a[n] if n else 0 for n in range(M + 1)], N, curve.label + "(x)chi-4")


def epsilon_sign(curve: CurveModel, prec: int = 128, t: float = 1.2) -> int:
    return curve_lseries(curve, prec, t).sign(prec, t)


def l_value(curve: CurveModel, s: int, prec: int = 128):
    """L(E, s), s in {1, 2}, as an mpmath number at ``prec`` bits."""
    series = curve_lseries(curve, prec)
    return series.value(s, series.sign(prec), prec)


def l_twist_chi4(curve: CurveModel, prec: int = 128):
    """L(E, chi_{-4}, 1)."""
    series = twisted_lseries(curve, prec)
    return series.value(1, series.sign(prec), prec)


def l_derivative_at_zero(curve: CurveModel, prec: int = 128):
    """L'(E, 0) = N / (2 pi)^2 L(E, 2)."""
    ctx = _ctx(prec + 20)
    return curve.conductor / (2 * ctx.pi) ** 2 * l_value(curve, 2, prec)


# ---------------------------------------------------------------------------
# identity checks

K_LABELS = {"1": 1, "sqrt2": 2, "2": 4, "2sqrt2": 8, "3": 9}


@dataclass
class IdentityCheck:
    name: str
    lhs: mpmath.mpf
    rhs: mpmath.mpf
    relative_diff: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.relative_diff < self.tolerance

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": mpmath.nstr(self.lhs, 30), "rhs": mpmath.nstr(self.rhs, 30),
                "relative_diff": self.relative_diff, "tolerance": self.tolerance, "passed": self.passed}


@dataclass
class LValueReport:
    curve: CurveModel
    epsilon: int
    L1: BallReal
    L2: BallReal
    L1_twist: BallReal | None
    mu: BallReal
    ratio: BallReal
    ratio_rational: Fraction | None
    identity_checks: list[IdentityCheck] = field(default_factory=list)
    # rho1(1/16) / L(E, chi_-4, 1), recorded for k = 1
    twist_ratio: Fraction | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.identity_checks) and self.ratio_rational is not None

    def to_json(self) -> dict:
        return {
            "label": self.curve.label,
            "k_squared": self.curve.k_squared,
            "conductor": self.curve.conductor,
            "epsilon": self.epsilon,
            "L1": self.L1.to_json(),
            "L2": self.L2.to_json(),
            "L1_twist": None if self.L1_twist is None else self.L1_twist.to_json(),
            "mu": self.mu.to_json(),
            "mu_over_Lprime0": self.ratio.to_json(),
            "mu_over_Lprime0_rational": None if self.ratio_rational is None else str(self.ratio_rational),
            "identity_checks": [c.to_json() for c in self.identity_checks],
            "rho1_over_twisted_L1": None if self.twist_ratio is None else str(self.twist_ratio),
            "passed": self.passed,
        }


def relative_diff(a, b, prec: int = 256) -> float:
    """|a - b| / max(|a|, |b|), symmetric in a and b."""
    ctx = _ctx(prec)
    a, b = ctx.convert(a), ctx.convert(b)
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else float(abs(a - b) / scale)


def _heuristic_ball(value, prec: int) -> BallReal:
    # tail below 2^-(prec+10) by choice of horizon; allow for summation error too
    return BallReal.from_value(value, Fraction(1, 2 ** (prec - 8)), prec + 20)


def verify_identities(k_label: str, prec: int = 128) -> LValueReport:
    """Compare mu(k) with L'(E, 0) and check the displayed L-value identities."""
    if k_label not in K_LABELS:
        raise KeyError(f"k must be one of {sorted(K_LABELS)}")
    k2 = K_LABELS[k_label]
    curve = curve_for_k_squared(k2)
    series = curve_lseries(curve, prec)
    eps = series.sign(prec)
    L1 = series.value(1, eps, prec)
    L2 = series.value(2, eps, prec)
    ctx = _ctx(prec + 20)
    pi = ctx.pi
    Lp0 = curve.conductor / (2 * pi) ** 2 * L2
    mu = hypergeom.mahler_mu_series(k2, prec)
    ratio = mu / _heuristic_ball(Lp0, prec)
    recon = rational_reconstruct(ratio, 64)
    L1_twist = None
    twist_ratio = None
    checks: list[IdentityCheck] = []
    z = Fraction(k2, 16)
    lam = hypergeom.lambda_val(z, prec).mid
    r1 = hypergeom.rho1(z, prec).mid
    if k_label == "2sqrt2":
        s2 = ctx.sqrt(2)
        checks += [
            IdentityCheck("lambda(1/2) = 16 sqrt2 L(E,2)/pi", lam, 16 * s2 * L2 / pi,
                          relative_diff(lam, 16 * s2 * L2 / pi), 1e-10),
            IdentityCheck("rho1(1/2) = 4 sqrt2 L(E,1)", r1, 4 * s2 * L1,
                          relative_diff(r1, 4 * s2 * L1), 1e-10),
            IdentityCheck("lambda(1/2) = 2 sqrt2 pi L'(E,0)", lam, 2 * s2 * pi * Lp0,
                          relative_diff(lam, 2 * s2 * pi * Lp0), 1e-10),
        ]
    elif k_label == "1":
        tw = twisted_lseries(curve, prec)
        Lt = tw.value(1, tw.sign(prec), prec)
        L1_twist = _heuristic_ball(Lt, prec)
        twist_ratio = rational_reconstruct(hypergeom.rho1(z, prec) / L1_twist, 64)
        checks += [
            IdentityCheck("lambda(1/16) = 30 L(E,2)/pi", lam, 30 * L2 / pi,
                          relative_diff(lam, 30 * L2 / pi), 1e-8),
            IdentityCheck("rho1(1/16) = L(E,chi_-4,1)/2", r1, Lt / 2,
                          relative_diff(r1, Lt / 2), 1e-8),
            IdentityCheck("lambda(1/16) = 8 pi L'(E,0)", lam, 8 * pi * Lp0,
                          relative_diff(lam, 8 * pi * Lp0), 1e-8),
        ]
    return LValueReport(curve, eps, _heuristic_ball(L1, prec), _heuristic_ball(L2, prec), L1_twist,
                        mu, ratio, recon, checks, twist_ratio)
