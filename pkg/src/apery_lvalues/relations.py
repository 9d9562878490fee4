"""Integer relations among real constants (PSLQ)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import mpmath

from .ball import BallReal


class InsufficientPrecision(ArithmeticError):
    """The working precision cannot separate relations of the requested size from noise."""


@dataclass
class RelationResult:
    coefficients: list[int] | None
    residual: float
    norm_bound: float
    iterations: int = 0

    @property
    def found(self) -> bool:
        return self.coefficients is not None

    def to_json(self) -> dict:
        return {"coefficients": self.coefficients, "residual": self.residual,
                "norm_bound": self.norm_bound, "iterations": self.iterations}


def required_precision(n_values: int, max_norm: int) -> int:
    return math.ceil(2 * math.log2(max(max_norm, 2)) * n_values) + 64


def _convert(ctx, v):
    if isinstance(v, BallReal):
        return ctx.convert(v.mid)
    if isinstance(v, Fraction):
        return ctx.mpf(v.numerator) / v.denominator
    if isinstance(v, str):
        return ctx.mpf(v)
    return ctx.convert(v)


def normalize_relation(c: Sequence[int]) -> list[int]:
    """Divide out the gcd and make the first nonzero entry positive."""
    g = reduce(math.gcd, (abs(x) for x in c), 0)
    if g == 0:
        raise ValueError("zero vector")
    out = [x // g for x in c]
    first = next(x for x in out if x)
    return [-x for x in out] if first < 0 else out


def find_relation(values: Sequence, max_norm: int = 10 ** 6, prec: int = 256,
                  max_iter: int = 10_000) -> RelationResult:
    """Search for integers c, 0 < max|c_i| <= max_norm, with sum c_i x_i ~ 0.

    A relation is accepted when |sum c_i x_i| < 2^(-prec/2) * max|x_i|.
    When none is found, ``norm_bound`` is a number B such that no relation
    of Euclidean norm below B exists among the values as given.
    """
    n = len(values)
    if n < 2:
        raise ValueError("need at least two values")
    if prec < required_precision(n, max_norm):
        raise InsufficientPrecision(
            f"{n} values with max_norm {max_norm} need >= {required_precision(n, max_norm)} bits, got {prec}")
    ctx = mpmath.MPContext()
    ctx.prec = prec
    x = [_convert(ctx, v) for v in values]
    scale = max(abs(v) for v in x)
    if scale == 0:
        raise ValueError("all values are zero")
    thresh = ctx.ldexp(scale, -(prec // 2))

    # a zero entry is a relation by itself
    for i, v in enumerate(x):
        if abs(v) < thresh:
            c = [0] * n
            c[i] = 1
            return RelationResult(c, float(abs(v)), 0.0, 0)

    x = [v / scale for v in x]
    s = [ctx.zero] * n
    acc = ctx.zero
    for k in range(n - 1, -1, -1):
        acc += x[k] ** 2
        s[k] = ctx.sqrt(acc)
    t = s[0]
    y = [v / t for v in x]
    s = [v / t for v in s]
    H = [[ctx.zero] * (n - 1) for _ in range(n)]
    for i in range(n):
        for j in range(min(i, n - 2) + 1):
            if i == j:
                H[i][j] = s[j + 1] / s[j]
            elif i > j:
                H[i][j] = -y[i] * y[j] / (s[j] * s[j + 1])
    A = [[int(i == j) for j in range(n)] for i in range(n)]
    B = [[int(i == j) for j in range(n)] for i in range(n)]

    def reduce_row(i, jmax):
        for j in range(jmax, -1, -1):
            if H[j][j] == 0:
                continue
            q = ctx.nint(H[i][j] / H[j][j])
            if q == 0:
                continue
            qi = int(q)
            y[j] += q * y[i]
            for k in range(j + 1):
                H[i][k] -= q * H[j][k]
            for k in range(n):
                A[i][k] -= qi * A[j][k]
                B[k][j] += qi * B[k][i]

    for i in range(1, n):
        reduce_row(i, i - 1)

    gamma = ctx.sqrt(ctx.mpf(4) / 3)
    bound = ctx.zero
    for it in range(1, max_iter + 1):
        m = max(range(n - 1), key=lambda i: gamma ** (i + 1) * abs(H[i][i]))
        y[m], y[m + 1] = y[m + 1], y[m]
        A[m], A[m + 1] = A[m + 1], A[m]
        H[m], H[m + 1] = H[m + 1], H[m]
        for row in B:
            row[m], row[m + 1] = row[m + 1], row[m]
        if m < n - 2:
            t0 = ctx.sqrt(H[m][m] ** 2 + H[m][m + 1] ** 2)
            t1, t2 = H[m][m] / t0, H[m][m + 1] / t0
            for i in range(m, n):
                t3, t4 = H[i][m], H[i][m + 1]
                H[i][m] = t1 * t3 + t2 * t4
                H[i][m + 1] = -t2 * t3 + t1 * t4
        for i in range(m + 1, n):
            reduce_row(i, min(i - 1, m + 1))

        best = None
        for j in range(n):
            col = [B[i][j] for i in range(n)]
            if max(abs(c) for c in col) > max_norm or not any(col):
                continue
            r = abs(ctx.fsum(c * v for c, v in zip(col, x))) * scale
            if r < thresh and (best is None or r < best[1]):
                best = (col, r)
        if best is not None:
            return RelationResult(normalize_relation(best[0]), float(best[1]), float(bound), it)

        hmax = max(abs(H[i][i]) for i in range(n - 1))
        if hmax == 0:
            break
        bound = max(bound, 1 / hmax)
        if bound > max_norm * math.sqrt(n):
            break
    return RelationResult(None, float("nan"), float(bound), it)
