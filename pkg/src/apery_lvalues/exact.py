"""Exact arithmetic: rationals, polynomials in (n, z), rational functions in n,
lcm tables and the recurrence data-file format.

Rationals are :class:`fractions.Fraction`; everything else here is a thin
immutable layer on top of Python integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

Rational = Fraction


def as_rational(x) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


# ---------------------------------------------------------------------------
# univariate polynomials over Q


class UniPoly:
    """Dense univariate polynomial over Q in the symbol ``n``.

    Coefficients are stored low degree first with no trailing zeros.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, c) -> "UniPoly":
        return cls([c])

    @classmethod
    def n(cls) -> "UniPoly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, complex) else 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_int(self, n: int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniPoly):
            other = _upoly(other)
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "UniPoly(0)"
        terms = [f"{c}*n^{i}" for i, c in enumerate(self.coeffs) if c]
        return "UniPoly(" + " + ".join(terms) + ")"

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self.coeffs)

    def __add__(self, other) -> "UniPoly":
        other = _upoly(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return UniPoly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __sub__(self, other) -> "UniPoly":
        return self + (-_upoly(other))

    def __rsub__(self, other) -> "UniPoly":
        return _upoly(other) - self

    def __mul__(self, other) -> "UniPoly":
        other = _upoly(other)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UniPoly":
        out = UniPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lc()
        quo = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - dq - 1, -1, -1):
            c = rem[k + dq] / lead
            quo[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return UniPoly(quo), UniPoly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other) -> "UniPoly":
        return self.divmod(_upoly(other))[0]

    def __mod__(self, other) -> "UniPoly":
        return self.divmod(_upoly(other))[1]

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        lead = self.lc()
        return UniPoly(c / lead for c in self.coeffs)

    def shift(self, k) -> "UniPoly":
        """Return p(n + k)."""
        if k == 0 or not self.coeffs:
            return self
        out = UniPoly()
        step = UniPoly([k, 1])
        for c in reversed(self.coeffs):
            out = out * step + UniPoly([c])
        return out

    def content(self) -> Fraction:
        """Positive rational c with self/c primitive in Z[n]."""
        if not self.coeffs:
            return Fraction(1)
        den = reduce(math.lcm, (c.denominator for c in self.coeffs), 1)
        num = reduce(math.gcd, (c.numerator * (den // c.denominator) for c in self.coeffs), 0)
        return Fraction(num, den)

    def primitive(self) -> "UniPoly":
        c = self.content()
        return UniPoly(x / c for x in self.coeffs)

    def integer_coeffs(self) -> list[int]:
        for c in self.coeffs:
            if c.denominator != 1:
                raise ValueError("polynomial has non-integer coefficients")
        return [c.numerator for c in self.coeffs]

    def gcd(self, other: "UniPoly") -> "UniPoly":
        """Monic gcd over Q (Euclid on primitive parts to keep sizes down)."""
        a, b = self.primitive(), _upoly(other).primitive()
        while not b.is_zero():
            a, b = b, (a % b).primitive()
        return a.monic()


def _upoly(x) -> UniPoly:
    return x if isinstance(x, UniPoly) else UniPoly([x])


# ---------------------------------------------------------------------------
# rational functions in n


class RationalFunction:
    """Reduced quotient of two UniPolys; the denominator is kept monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, reduce_gcd: bool = True):
        num = _upoly(num)
        den = UniPoly([1]) if den is None else _upoly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = UniPoly(), UniPoly([1])
        elif reduce_gcd and den.degree > 0:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num // g, den // g
        lead = den.lc()
        if lead != 1:
            num = UniPoly(c / lead for c in num.coeffs)
            den = UniPoly(c / lead for c in den.coeffs)
        self.num = num
        self.den = den

    def __call__(self, n) -> Fraction:
        d = self.den(n)
        if d == 0:
            raise ZeroDivisionError(f"pole at n={n}")
        return self.num(n) / d

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other) -> bool:
        other = _rf(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFunction({self.num!r} / {self.den!r})"

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, reduce_gcd=False)

    def __add__(self, other) -> "RationalFunction":
        other = _rf(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFunction":
        return self + (-_rf(other))

    def __rsub__(self, other) -> "RationalFunction":
        return _rf(other) - self

    def __mul__(self, other) -> "RationalFunction":
        other = _rf(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = _rf(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def shift(self, k) -> "RationalFunction":
        return RationalFunction(self.num.shift(k), self.den.shift(k), reduce_gcd=False)


def _rf(x) -> RationalFunction:
    return x if isinstance(x, RationalFunction) else RationalFunction(x)


# ---------------------------------------------------------------------------
# bivariate integer polynomials in (n, z)


@dataclass(frozen=True)
class BivariatePoly:
    """Sparse integer polynomial in ``n`` and ``z``.

    ``terms`` maps ``(deg_n, deg_z)`` to a nonzero integer coefficient.
    """

    terms: Mapping[tuple[int, int], int]

    def __post_init__(self):
        clean = {}
        for (dn, dz), c in self.terms.items():
            if dn < 0 or dz < 0:
                raise ValueError("negative exponent in BivariatePoly")
            if c:
                clean[(int(dn), int(dz))] = int(c)
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def zero(cls) -> "BivariatePoly":
        return cls({})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def deg_n(self) -> int:
        return max((dn for dn, _ in self.terms), default=-1)

    @property
    def deg_z(self) -> int:
        return max((dz for _, dz in self.terms), default=-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, BivariatePoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def __add__(self, other: "BivariatePoly") -> "BivariatePoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BivariatePoly(out)

    def __neg__(self) -> "BivariatePoly":
        return BivariatePoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "BivariatePoly") -> "BivariatePoly":
        return self + (-other)

    def __mul__(self, other: "BivariatePoly") -> "BivariatePoly":
        out: dict[tuple[int, int], int] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + c1 * c2
        return BivariatePoly(out)

    def __call__(self, n, z) -> Fraction:
        return poly_eval(self, n, z)

    def specialize_z(self, z) -> UniPoly:
        """The univariate polynomial in n obtained by fixing z."""
        z = as_rational(z)
        coeffs = [Fraction(0)] * (self.deg_n + 1)
        for (dn, dz), c in self.terms.items():
            coeffs[dn] += c * z**dz
        return UniPoly(coeffs)

    def leading_n_coeff(self, z) -> Fraction:
        """Coefficient of the top power of n (top among nonzero at this z)."""
        p = self.specialize_z(z)
        return p.lc()


def poly_eval(P: BivariatePoly, n: int, z) -> Fraction:
    """Exact value of ``P`` at integer ``n`` and rational ``z``."""
    z = as_rational(z)
    total = Fraction(0)
    for (dn, dz), c in P.terms.items():
        total += c * n**dn * z**dz
    return total


# ---------------------------------------------------------------------------
# D_n = lcm(1..n)


class LcmTable:
    """Growing table of D_n = lcm(1, ..., n), with D_0 = 1 by convention."""

    def __init__(self, upto: int = 1):
        self.values: list[int] = [1, 1]
        self.extend(upto)

    def extend(self, upto: int) -> None:
        vals = self.values
        for k in range(len(vals), upto + 1):
            vals.append(math.lcm(vals[-1], k))

    def __getitem__(self, n: int) -> int:
        if n < 0:
            raise IndexError("D_n is defined for n >= 0")
        if n >= len(self.values):
            self.extend(n)
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


_LCM = LcmTable(64)


def lcm_upto(n: int) -> int:
    if n < 1:
        raise ValueError("lcm_upto requires n >= 1")
    return _LCM[n]


# ---------------------------------------------------------------------------
# rational reconstruction


def rational_reconstruct(x, max_denominator: int) -> Fraction | None:
    """Recover a fraction with denominator at most ``max_denominator`` lying in
    the ball ``x`` (a :class:`~apery_lvalues.ball.BallReal`).

    Any such fraction is within ``1/(2 q^2)`` of the midpoint, hence a
    convergent of it, so ``limit_denominator`` finds it whenever it exists.
    """
    mid = x.mid_fraction()
    cand = mid.limit_denominator(max_denominator)
    return cand if x.contains(cand) else None


# ---------------------------------------------------------------------------
# recurrence data files


class DataFormatError(ValueError):
    pass


@dataclass(frozen=True)
class RecurrenceData:
    name: str
    order: int
    offset: int
    coefficients: tuple[BivariatePoly, ...]


def parse_recurrence_text(text: str) -> RecurrenceData:
    """Parse the ``recurrence <name> order <r> [offset <k>]`` format.

    Blank lines and ``#`` comments are ignored.  Coefficient ``i`` multiplies
    ``x[n + offset - i]``.
    """
    header = None
    blocks: dict[int, dict[tuple[int, int], int]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "recurrence":
            if header is not None or len(tok) not in (4, 6) or tok[2] != "order":
                raise DataFormatError(f"line {lineno}: bad header {raw!r}")
            offset = 0
            if len(tok) == 6:
                if tok[4] != "offset":
                    raise DataFormatError(f"line {lineno}: bad header {raw!r}")
                offset = int(tok[5])
            header = (tok[1], int(tok[3]), offset)
        elif tok[0] == "coeff":
            if header is None or len(tok) != 2:
                raise DataFormatError(f"line {lineno}: coeff block before header")
            current = int(tok[1])
            if current in blocks:
                raise DataFormatError(f"line {lineno}: duplicate coeff {current}")
            blocks[current] = {}
        else:
            if current is None or len(tok) != 3:
                raise DataFormatError(f"line {lineno}: expected '<deg_n> <deg_z> <int>'")
            dn, dz, c = int(tok[0]), int(tok[1]), int(tok[2])
            if (dn, dz) in blocks[current]:
                raise DataFormatError(f"line {lineno}: repeated monomial")
            blocks[current][(dn, dz)] = c
    if header is None:
        raise DataFormatError("missing recurrence header")
    name, order, offset = header
    if sorted(blocks) != list(range(order + 1)):
        raise DataFormatError(f"expected coeff blocks 0..{order}, got {sorted(blocks)}")
    return RecurrenceData(name, order, offset, tuple(BivariatePoly(blocks[i]) for i in range(order + 1)))


def format_recurrence_text(data: RecurrenceData) -> str:
    lines = [f"recurrence {data.name} order {data.order} offset {data.offset}"]
    for i, P in enumerate(data.coefficients):
        lines.append(f"coeff {i}")
        lines.extend(f"{dn} {dz} {c}" for (dn, dz), c in P.terms.items())
    return "\n".join(lines) + "\n"


def integer_content(values: Sequence[int]) -> int:
    return reduce(math.gcd, values, 0)
