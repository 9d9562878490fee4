"""The concrete sequences: Apery's u_n, v_n; the coordinates a_n, b_n, c_n of
J_n(z) in the basis lambda, rho_1, rho_2; the determinants A_n, B_n; their
integrality and their quotient limits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .ball import BallReal
from .exact import LcmTable, as_rational
from .recurrence import load_recurrence, run, run_many


class PaperInitialMismatch(AssertionError):
    """Determinant-built initial values disagree with the printed closed forms."""


def apery_zeta3(N: int) -> tuple[list[Fraction], list[Fraction]]:
    """u_0..u_N and v_0..v_N with u = (0, 6, ...), v = (1, 5, ...)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    rec = load_recurrence("apery_zeta3")
    u, v = run_many(rec, 0, [[0, 6], [1, 5]], N)
    return list(u.values), list(v.values)


# ---------------------------------------------------------------------------
# coordinates of J_n


def j1_coordinates(z) -> tuple[Fraction, Fraction, Fraction]:
    z = as_rational(z)
    return (-(3 + 4 * z) / (4 * z ** 2), -5 * (1 - z) / z ** 2, Fraction(13, 2) / z ** 2)


def j2_coordinates(z) -> tuple[Fraction, Fraction, Fraction]:
    z = as_rational(z)
    z4 = z ** 4
    return ((105 + 480 * z + 64 * z ** 2) / (64 * z4),
            (3151 - 2167 * z - 984 * z ** 2) / (144 * z4),
            -(7247 + 3452 * z) / (288 * z4))


@dataclass
class CoordinateTriple:
    z: Fraction
    a: list[Fraction]
    b: list[Fraction]
    c: list[Fraction]


def coordinate_triple(z, N: int) -> CoordinateTriple:
    """a_n, b_n, c_n for n <= N by running the J recurrence on each coordinate."""
    z = as_rational(z)
    if z == 0:
        raise ValueError("z must be nonzero")
    one = (Fraction(1), Fraction(0), Fraction(0))
    j1, j2 = j1_coordinates(z), j2_coordinates(z)
    inits = [[one[i], j1[i], j2[i]] for i in range(3)]
    a, b, c = run_many(load_recurrence("j_family"), z, inits, N)
    return CoordinateTriple(z, list(a.values), list(b.values), list(c.values))


# ---------------------------------------------------------------------------
# determinants


def printed_initial_A(z) -> list[Fraction]:
    z = as_rational(z)
    return [
        Fraction(13, 2) / z ** 2,
        (395 * z ** 2 - 1051 * z + 591) / (72 * z ** 6),
        (15196 * z ** 4 - 201551 * z ** 3 + 548091 * z ** 2 - 543600 * z + 183120) / (3600 * z ** 10),
    ]


def printed_initial_B(z) -> list[Fraction]:
    z = as_rational(z)
    return [
        Fraction(0),
        (1117 * z ** 2 - 2299 * z + 1182) / (72 * z ** 6),
        (6867 * z ** 4 - 65547 * z ** 3 + 156430 * z ** 2 - 143530 * z + 45780) / (450 * z ** 10),
    ]


@dataclass
class WedgePair:
    z: Fraction
    A: list[Fraction]
    B: list[Fraction]


def wedge_from_coordinates(t: CoordinateTriple) -> WedgePair:
    n_max = len(t.a) - 1
    A = [t.a[n] * t.c[n + 1] - t.a[n + 1] * t.c[n] for n in range(n_max)]
    B = [-(t.b[n] * t.c[n + 1] - t.b[n + 1] * t.c[n]) for n in range(n_max)]
    return WedgePair(t.z, A, B)


def wedge_pair(z, N: int) -> WedgePair:
    """A_0..A_N and B_0..B_N from the 2x2 determinants of the coordinates."""
    if N < 2:
        raise ValueError("N must be >= 2")
    w = wedge_from_coordinates(coordinate_triple(z, N + 1))
    if w.A[:3] != printed_initial_A(w.z):
        raise PaperInitialMismatch(f"A_0..A_2 at z={w.z}: {w.A[:3]} vs {printed_initial_A(w.z)}")
    if w.B[:3] != printed_initial_B(w.z):
        raise PaperInitialMismatch(f"B_0..B_2 at z={w.z}: {w.B[:3]} vs {printed_initial_B(w.z)}")
    return w


# ---------------------------------------------------------------------------
# integrality

CLAIMS = ("a", "b", "c", "A", "B")
CLAIM_TEXT = {
    "a": "z^n 2^(4n) a_n",
    "b": "z^n 2^(4n) D_2n^2 b_n",
    "c": "z^n 2^(4n) D_2n^2 c_n",
    "A": "z^(2n+2) 2^(2n) D_2n (n+1)(2n+1)^2 A_n",
    "B": "z^(2n+2) 2^(2n) D_2n^2 (n+1)(2n+1)^2 B_n",
}
DEFAULT_ZINV = (2, -2, 3, -3, 4, -4, 5, -5, 8, -8, 16)


@dataclass
class ClaimResult:
    id: str
    first_fail: int | None
    failures: list[int] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "pass" if self.first_fail is None else "fail"

    def to_json(self) -> dict:
        return {"id": self.id, "text": CLAIM_TEXT[self.id], "status": self.status,
                "first_fail": self.first_fail, "failures": self.failures}


@dataclass
class IntegralityReport:
    z: Fraction
    N: int
    claims: list[ClaimResult]

    @property
    def passed(self) -> bool:
        return all(c.first_fail is None for c in self.claims)

    def claim(self, cid: str) -> ClaimResult:
        return next(c for c in self.claims if c.id == cid)

    def failures(self) -> list[tuple[str, int]]:
        return [(c.id, n) for c in self.claims for n in c.failures]

    def to_json(self) -> dict:
        return {"z": str(self.z), "N": self.N, "claims": [c.to_json() for c in self.claims],
                "passed": self.passed}


def integrality_report(z, N: int) -> IntegralityReport:
    """Check the five displayed memberships exactly for n = 0..N."""
    z = as_rational(z)
    if z == 0 or (1 / z).denominator != 1 or abs(1 / z) < 2:
        raise ValueError(f"need 1/z an integer with |1/z| >= 2, got z = {z}")
    t = coordinate_triple(z, N + 1)
    w = wedge_from_coordinates(t)
    D = LcmTable(2 * N)
    fails: dict[str, list[int]] = {cid: [] for cid in CLAIMS}
    for n in range(N + 1):
        d = D[2 * n]
        s1 = z ** n * 2 ** (4 * n)
        s2 = z ** (2 * n + 2) * 2 ** (2 * n) * (n + 1) * (2 * n + 1) ** 2
        checks = {
            "a": s1 * t.a[n],
            "b": s1 * d * d * t.b[n],
            "c": s1 * d * d * t.c[n],
            "A": s2 * d * w.A[n],
            "B": s2 * d * d * w.B[n],
        }
        for cid, val in checks.items():
            if val.denominator != 1:
                fails[cid].append(n)
    claims = [ClaimResult(cid, fails[cid][0] if fails[cid] else None, fails[cid]) for cid in CLAIMS]
    return IntegralityReport(z, N, claims)


def apery_integrality(N: int) -> list[int]:
    """Indices 1 <= n <= N where v_n or D_n^3 u_n fails to be an integer."""
    u, v = apery_zeta3(N)
    D = LcmTable(N)
    return [n for n in range(1, N + 1)
            if v[n].denominator != 1 or (D[n] ** 3 * u[n]).denominator != 1]


# ---------------------------------------------------------------------------
# limits


@dataclass
class AperyLimit:
    value: BallReal
    rate: float
    n: int

    def to_json(self) -> dict:
        return {"value": self.value.to_json()["midpoint"], "error": self.value.to_json()["radius"],
                "rate": self.rate, "n": self.n}


def _to_mpf(ctx, q: Fraction):
    return ctx.mpf(q.numerator) / q.denominator


def apery_limit(numerators: Sequence, denominators: Sequence, prec: int = 128,
                window: int = 10) -> AperyLimit:
    """Last available quotient, with |q_N - q_{N-1}| as the error.

    The rate is the geometric ratio of successive differences, fitted by
    least squares on log|q_n - q_{n-1}| over the last ``window`` steps.
    """
    nums = [as_rational(x) for x in numerators]
    dens = [as_rational(x) for x in denominators]
    qs = [(n, p / q) for n, (p, q) in enumerate(zip(nums, dens)) if q != 0]
    if not qs:
        raise ValueError("no nonzero denominators")
    ctx = mpmath.MPContext()
    ctx.prec = prec + 20
    N, qN = qs[-1]
    diffs = [(qs[i][0], abs(qs[i][1] - qs[i - 1][1])) for i in range(1, len(qs))]
    err = diffs[-1][1] if diffs else Fraction(0)
    value = BallReal.from_value(_to_mpf(ctx, qN), err, prec)
    tail = [(n, d) for n, d in diffs[-window:]]
    if len(tail) < 2 or tail[-1][1] == 0:
        rate = 0.0
    else:
        pts = [(n, math.log(float(_to_mpf(ctx, d)))) for n, d in tail if d != 0]
        if len(pts) < 2:
            rate = 0.0
        else:
            mx = sum(p[0] for p in pts) / len(pts)
            my = sum(p[1] for p in pts) / len(pts)
            slope = (sum((x - mx) * (y - my) for x, y in pts)
                     / sum((x - mx) ** 2 for x, _ in pts))
            rate = math.exp(slope)
    return AperyLimit(value, rate, N)


def predicted_rate(z) -> float:
    """|second| / |largest| characteristic root of the A_n recurrence at infinity."""
    from .recurrence import characteristic_roots_at_infinity
    roots = characteristic_roots_at_infinity(load_recurrence("wedge_printed"), z)
    mods = sorted((float(abs(r.value)) for r in roots), reverse=True)
    return mods[1] / mods[0]


def log_denominator_slope(values: Sequence) -> float:
    """Least-squares slope of log(denominator) against n over the second half."""
    pts = [(n, math.log(as_rational(v).denominator)) for n, v in enumerate(values)]
    pts = pts[len(pts) // 2:]
    if len(pts) < 2:
        return 0.0
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    return sum((x - mx) * (y - my) for x, y in pts) / sum((x - mx) ** 2 for x, _ in pts)


def limit_report(z, N: int, prec: int = 128) -> dict:
    """Integrality claims (when 1/z is an integer) plus the B_n/A_n limit."""
    z = as_rational(z)
    w = wedge_pair(z, N)
    lim = apery_limit(w.B, w.A, prec)
    out: dict = {"z": str(z), "N": N}
    if (1 / z).denominator == 1 and abs(1 / z) >= 2:
        out["claims"] = [
            {"id": c.id, "status": c.status, "first_fail": c.first_fail}
            for c in integrality_report(z, N).claims
        ]
    else:
        out["claims"] = []
    out["limit"] = lim.to_json()
    out["predicted_rate"] = predicted_rate(z)
    # measured only; no growth constant is asserted
    out["log_denominator_slope"] = {"A": log_denominator_slope(w.A), "B": log_denominator_slope(w.B)}
    return out
