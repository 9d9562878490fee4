"""Linear recurrences with polynomial coefficients in (n, z).

A :class:`Recurrence` of order ``r`` with coefficient polynomials
``p_0 .. p_r`` and offset ``s`` encodes, for each admissible ``n``,

    sum_i p_i(n, z) * x[n + s - i] = 0,

so ``p_0`` multiplies the highest shift.  The first index that can be solved
for is ``x[r]``, from the relation at ``n = r - s``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import combinations
from typing import Sequence

import mpmath

from .ball import BallReal
from .exact import (
    BivariatePoly,
    RationalFunction,
    UniPoly,
    as_rational,
    parse_recurrence_text,
)


class LeadingCoefficientVanishes(ArithmeticError):
    def __init__(self, n: int, z=None):
        super().__init__(f"leading coefficient vanishes at n={n} (z={z})")
        self.n = n
        self.z = z


class DegenerateSystem(ArithmeticError):
    """The 2x2 minors satisfy a recurrence of lower order than 3."""

    def __init__(self, operator: "Recurrence"):
        super().__init__(f"minor sequence satisfies an order-{operator.order} recurrence")
        self.operator = operator


class InsufficientPrecision(ArithmeticError):
    pass


@dataclass(frozen=True)
class Recurrence:
    name: str
    order: int
    coefficients: tuple[BivariatePoly, ...]
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if self.order < 1 or len(self.coefficients) != self.order + 1:
            raise ValueError("order must equal len(coefficients) - 1 and be >= 1")
        if self.coefficients[0].is_zero() or self.coefficients[-1].is_zero():
            raise ValueError("first and last coefficients must be nonzero")

    @property
    def first_relation(self) -> int:
        """Smallest n whose relation determines x[order]."""
        return self.order - self.offset

    def at(self, z) -> list[UniPoly]:
        """Coefficients specialised at ``z`` (still indexed by the raw ``n``)."""
        return [P.specialize_z(z) for P in self.coefficients]

    def normalized_int_polys(self, z) -> list[list[int]]:
        """Integer coefficient lists of ``c * p_i(m + order - offset, z)``.

        The common positive factor ``c`` clears denominators; with these the
        relation at ``m >= 0`` determines ``x[m + order]``.
        """
        return _normalized_int_polys(self, as_rational(z))

    def leading_zero_indices(self, z, N: int) -> list[int]:
        """Indices m <= N (as x[m]) whose forward step would divide by zero."""
        polys = self.normalized_int_polys(z)
        return [m for m in range(self.order, N + 1) if _horner(polys[0], m - self.order) == 0]


@lru_cache(maxsize=256)
def _normalized_int_polys(rec: Recurrence, z: Fraction) -> list[list[int]]:
    shift = rec.order - rec.offset
    polys = [p.shift(shift) for p in rec.at(z)]
    den = 1
    for p in polys:
        for c in p.coeffs:
            den = math.lcm(den, c.denominator)
    return [[int(c * den) for c in p.coeffs] for p in polys]


def _horner(coeffs: Sequence[int], n: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * n + c
    return acc


def load_recurrence(name: str) -> Recurrence:
    """Load one of the bundled recurrence data files by name."""
    text = resources.files("apery_lvalues.data").joinpath(f"{name}.rec").read_text(encoding="utf-8")
    return recurrence_from_text(text)


def recurrence_from_text(text: str) -> Recurrence:
    data = parse_recurrence_text(text)
    return Recurrence(data.name, data.order, data.coefficients, data.offset)


# ---------------------------------------------------------------------------
# exact runs


@dataclass
class SequenceRun:
    z: Fraction
    values: list[Fraction]
    recurrence: Recurrence = field(repr=False)

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)

    def to_json(self) -> list[dict]:
        return [
            {"n": i, "numerator": str(v.numerator), "denominator": str(v.denominator)}
            for i, v in enumerate(self.values)
        ]

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def run(rec: Recurrence, z, initial: Sequence, N: int) -> SequenceRun:
    """Unroll ``rec`` exactly from ``initial`` (x[0..order-1]) up to x[N]."""
    z = as_rational(z)
    r = rec.order
    if len(initial) != r:
        raise ValueError(f"need {r} initial values, got {len(initial)}")
    values = [as_rational(v) for v in initial]
    if N < r - 1:
        return SequenceRun(z, values[: N + 1], rec)
    polys = rec.normalized_int_polys(z)
    for m in range(r, N + 1):
        n = m - r
        lead = _horner(polys[0], n)
        if lead == 0:
            raise LeadingCoefficientVanishes(m, z)
        acc = Fraction(0)
        for i in range(1, r + 1):
            c = _horner(polys[i], n)
            if c:
                acc += c * values[m - i]
        values.append(-acc / lead)
    return SequenceRun(z, values, rec)


def run_many(rec: Recurrence, z, initials: Sequence[Sequence], N: int) -> list[SequenceRun]:
    """Several runs sharing coefficient evaluations (same z, same recurrence)."""
    z = as_rational(z)
    r = rec.order
    seqs = [[as_rational(v) for v in init] for init in initials]
    if any(len(s) != r for s in seqs):
        raise ValueError(f"need {r} initial values per sequence")
    polys = rec.normalized_int_polys(z)
    for m in range(r, N + 1):
        n = m - r
        lead = _horner(polys[0], n)
        if lead == 0:
            raise LeadingCoefficientVanishes(m, z)
        cs = [_horner(polys[i], n) for i in range(1, r + 1)]
        for vals in seqs:
            acc = Fraction(0)
            for i, c in enumerate(cs, 1):
                if c:
                    acc += c * vals[m - i]
            vals.append(-acc / lead)
    return [SequenceRun(z, s[: N + 1], rec) for s in seqs]


# ---------------------------------------------------------------------------
# companion matrices


def companion_matrix(rec: Recurrence, z) -> list[list[RationalFunction]]:
    """M(n) with M(n) (x[n+s-r], ..., x[n+s-1])^T = (x[n+s-r+1], ..., x[n+s])^T."""
    z = as_rational(z)
    r = rec.order
    ps = rec.at(z)
    if ps[0].is_zero():
        raise LeadingCoefficientVanishes(-1, z)
    zero, one = RationalFunction(0), RationalFunction(1)
    M = [[one if j == i + 1 else zero for j in range(r)] for i in range(r - 1)]
    M.append([RationalFunction(-ps[r - j], ps[0]) for j in range(r)])
    return M


def eval_matrix(M: Sequence[Sequence[RationalFunction]], n) -> list[list[Fraction]]:
    return [[f(n) for f in row] for row in M]


# ---------------------------------------------------------------------------
# exterior square
#
# Integer polynomials are plain lists of ints (low degree first) in this
# section; the determinant step would be slow with Fraction coefficients.


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _padd(a: list[int], b: list[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _ptrim(out)


def _pneg(a: list[int]) -> list[int]:
    return [-c for c in a]


def _pmul(a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ptrim(out)


def _pshift(a: list[int], k: int) -> list[int]:
    """a(n + k) for integer k."""
    out: list[int] = []
    for c in reversed(a):
        # out = out * (n + k) + c
        nxt = [0] * (len(out) + 1)
        for i, x in enumerate(out):
            nxt[i] += x * k
            nxt[i + 1] += x
        nxt[0] += c
        out = nxt
    return _ptrim(out)


def _det2(a, b, c, d) -> list[int]:
    return _padd(_pmul(a, d), _pneg(_pmul(b, c)))


def _det(rows: list[list[list[int]]]) -> list[int]:
    k = len(rows)
    if k == 1:
        return rows[0][0]
    if k == 2:
        return _det2(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    total: list[int] = []
    for j in range(k):
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = _pmul(rows[0][j], _det(minor))
        total = _padd(total, term if j % 2 == 0 else _pneg(term))
    return total


def _wedge_matrix_polys(rec: Recurrence, z: Fraction):
    """Polynomial numerator Q(n) of the second exterior power of M(n) and p_0(n).

    Returns (Q, p0) with Lambda^2 M(n) = Q(n) / p0(n)^2, in the basis of minors
    (0,1), (0,2), (1,2) of the state vector.
    """
    ps = rec.at(z)
    den = 1
    for p in ps:
        for c in p.coeffs:
            den = math.lcm(den, c.denominator)
    ip = [[int(c * den) for c in p.coeffs] for p in ps]
    r = rec.order
    # polynomial companion numerator N(n) = p0(n) * M(n)
    N = [[ip[0] if j == i + 1 else [] for j in range(r)] for i in range(r - 1)]
    N.append([_pneg(ip[r - j]) for j in range(r)])
    pairs = list(combinations(range(r), 2))
    Q = [[_det2(N[a][c], N[a][d], N[b][c], N[b][d]) for (c, d) in pairs] for (a, b) in pairs]
    return Q, ip[0]


def _row_times(row: list[list[int]], Q: list[list[list[int]]]) -> list[list[int]]:
    m = len(Q)
    out = []
    for j in range(m):
        acc: list[int] = []
        for k in range(m):
            acc = _padd(acc, _pmul(row[k], Q[k][j]))
        out.append(acc)
    return out


def _normalize_operator(polys: list[list[int]]) -> list[list[int]]:
    """Divide out the common polynomial gcd and integer content; fix the sign."""
    ups = [UniPoly(p) for p in polys]
    g = None
    for p in ups:
        if not p.is_zero():
            g = p if g is None else g.gcd(p)
    if g is not None and g.degree > 0:
        ups = [p // g for p in ups]
    den = 1
    for p in ups:
        for c in p.coeffs:
            den = math.lcm(den, c.denominator)
    ints = [[int(c * den) for c in p.coeffs] for p in ups]
    cont = 0
    for p in ints:
        for c in p:
            cont = math.gcd(cont, c)
    ints = [[c // cont for c in p] for p in ints]
    if ints[0] and ints[0][-1] < 0:
        ints = [_pneg(p) for p in ints]
    return ints


def _as_bivariate(p: list[int]) -> BivariatePoly:
    return BivariatePoly({(i, 0): c for i, c in enumerate(p) if c})


def exterior_square(rec: Recurrence, z) -> Recurrence:
    """Order-3 recurrence annihilating x[n] y[n+1] - x[n+1] y[n] for all
    solution pairs (x, y) of the order-3 recurrence ``rec`` at fixed ``z``.

    The result uses the same index convention (offset) as ``rec``.
    """
    z = as_rational(z)
    if rec.order != 3:
        raise ValueError("exterior_square is implemented for order-3 recurrences")
    Q, p0 = _wedge_matrix_polys(rec, z)
    d = _pmul(p0, p0)
    # P_k(n): numerator of the row e_1 Lambda^2M(n+k-1) ... Lambda^2M(n);
    # m_1(n+k) = P_k(n) m(n) / prod_{j<k} d(n+j)
    P = [[[1], [], []]]
    for _ in range(3):
        prev = P[-1]
        P.append(_row_times([_pshift(e, 1) for e in prev], Q))
    dshift = [_pshift(d, j) for j in range(3)]
    V = []
    for k in range(4):
        scale = [1]
        for j in range(k, 3):
            scale = _pmul(scale, dshift[j])
        V.append([_pmul(e, scale) for e in P[k]])
    name = f"{rec.name}_xsq"
    # smallest k for which V_0..V_k are dependent (generic rank test at a
    # few integer points, then exact kernel by cofactors)
    for k in range(1, 4):
        rows = V[: k + 1]
        kernel = _left_kernel(rows)
        if kernel is not None:
            # gamma_i multiplies m_1(n + i); p_0 of the output multiplies the top shift
            coeffs = _normalize_operator(list(reversed(kernel)))
            out = Recurrence(name, k, tuple(_as_bivariate(c) for c in coeffs), rec.offset - rec.order + k)
            if k < 3:
                raise DegenerateSystem(out)
            return out
    raise AssertionError("four vectors in a 3-dimensional space are always dependent")


def _left_kernel(rows: list[list[list[int]]]) -> list[list[int]] | None:
    """Cofactor kernel of k+1 polynomial row vectors of length 3, if rank is k."""
    k = len(rows) - 1
    for cols in combinations(range(3), k):
        sub = [[row[c] for c in cols] for row in rows]
        gam = []
        for i in range(k + 1):
            minor = _det([sub[j] for j in range(k + 1) if j != i]) if k > 0 else [1]
            gam.append(minor if i % 2 == 0 else _pneg(minor))
        if not any(gam):
            continue
        # verify it kills every column, not just the chosen ones
        ok = True
        for c in range(3):
            acc: list[int] = []
            for i in range(k + 1):
                acc = _padd(acc, _pmul(gam[i], rows[i][c]))
            if acc:
                ok = False
                break
        if ok:
            return gam
        return None
    return None


def cross_division_factors(lhs: Recurrence, rhs: Recurrence, z, sample: Sequence[int]):
    """Ratios lhs_i(n)/rhs_i(n) at each sample n.

    Returns ``{n: ratio}`` when, at each n, every nonzero pair of coefficients
    gives the same ratio (and zeros coincide); raises ValueError otherwise.
    """
    if lhs.order != rhs.order:
        raise ValueError("orders differ")
    z = as_rational(z)
    a = [p.shift(lhs.offset - rhs.offset) for p in lhs.at(z)]
    b = rhs.at(z)
    out = {}
    for n in sample:
        ratio = None
        for pa, pb in zip(a, b):
            va, vb = pa.eval_int(n), pb.eval_int(n)
            if vb == 0:
                if va != 0:
                    raise ValueError(f"coefficient zero pattern differs at n={n}")
                continue
            q = va / vb
            if ratio is None:
                ratio = q
            elif q != ratio:
                raise ValueError(f"coefficient ratios disagree at n={n}: {ratio} vs {q}")
        out[n] = ratio
    return out


# ---------------------------------------------------------------------------
# asymptotics


@dataclass(frozen=True)
class RootBall:
    value: mpmath.mpc
    radius: mpmath.mpf

    def __abs__(self):
        return abs(self.value)


def characteristic_polynomial(rec: Recurrence, z) -> list[Fraction]:
    """Coefficients (highest power first) of sum_i lc_i * lambda^(r-i)."""
    ps = rec.at(z)
    d = max(p.degree for p in ps)
    return [p.coeffs[d] if p.degree == d else Fraction(0) for p in ps]


def characteristic_roots_at_infinity(rec: Recurrence, z, prec: int = 113) -> list[RootBall]:
    """Roots of the limiting characteristic polynomial with inclusion radii.

    Each radius is deg * |P(r)/P'(r)|, the classical Newton inclusion disc
    (evaluated with 64 guard bits).
    """
    coeffs = characteristic_polynomial(rec, z)
    zeros = 0
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
        zeros += 1
    ctx = mpmath.MPContext()
    ctx.prec = prec + 64
    roots: list[RootBall] = [RootBall(ctx.mpc(0), ctx.mpf(0)) for _ in range(zeros)]
    if len(coeffs) > 1:
        cs = [ctx.mpf(c.numerator) / c.denominator for c in coeffs]
        deg = len(cs) - 1
        found = ctx.polyroots(cs, maxsteps=200, extraprec=prec)
        dcs = [c * (deg - i) for i, c in enumerate(cs[:-1])]
        for r in found:
            r = ctx.mpc(r)
            pv = ctx.polyval(cs, r)
            dv = ctx.polyval(dcs, r)
            rad = deg * abs(pv) / abs(dv) if dv != 0 else ctx.inf
            roots.append(RootBall(r, rad))
    roots.sort(key=lambda rb: -abs(rb.value))
    return roots


# ---------------------------------------------------------------------------
# numerical transcription check


@dataclass
class AnnihilationReport:
    ok: bool
    windows: list[tuple[int, BallReal]]

    def __bool__(self) -> bool:
        return self.ok


def verify_annihilates(rec: Recurrence, z, values: Sequence[BallReal],
                       resolution: float = 1e-3) -> AnnihilationReport:
    """Check sum_i p_i(n,z) values[n+s-i] contains 0 for every full window.

    Raises InsufficientPrecision when a window's radius exceeds
    ``resolution`` times the size of its largest term, since containment of
    0 would then say nothing about the recurrence.
    """
    z = as_rational(z)
    r, s = rec.order, rec.offset
    if len(values) <= r:
        raise ValueError("need more values than the order")
    ps = rec.at(z)
    windows = []
    ok = True
    for n in range(r - s, len(values) - s):
        if n + s - r < 0:
            continue
        acc = None
        scale = 0.0
        for i, p in enumerate(ps):
            term = values[n + s - i] * p.eval_int(n)
            scale = max(scale, abs(float(term)))
            acc = term if acc is None else acc + term
        if acc.radius_float() > resolution * scale and scale > 0:
            raise InsufficientPrecision(
                f"window n={n}: radius {acc.radius_float():.3g} vs term size {scale:.3g}")
        windows.append((n, acc))
        if not acc.contains_zero():
            ok = False
    return AnnihilationReport(ok, windows)
