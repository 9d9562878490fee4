"""Acceptance criteria 1-11, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in
the terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from apery_lvalues import cli  # noqa: E402
from apery_lvalues import hypergeom as hg  # noqa: E402
from apery_lvalues import lseries as ls  # noqa: E402
from apery_lvalues import quadrature as qd  # noqa: E402
from apery_lvalues.recurrence import (  # noqa: E402
    cross_division_factors,
    exterior_square,
    load_recurrence,
    verify_annihilates,
)
from apery_lvalues.relations import find_relation  # noqa: E402
from apery_lvalues.sequences import (  # noqa: E402
    DEFAULT_ZINV,
    apery_integrality,
    apery_limit,
    apery_zeta3,
    integrality_report,
    predicted_rate,
    printed_initial_A,
    printed_initial_B,
    wedge_from_coordinates,
    coordinate_triple,
    wedge_pair,
)

RESULTS: dict[int, str] = {}


def record(num: int, ok: bool, detail: str) -> bool:
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[num] = line
    print(line)
    return ok


def exact_residuals(rec, z, vals):
    ps = rec.at(z)
    r, s = rec.order, rec.offset
    return [n for n in range(r - s, len(vals) - s)
            if sum(p.eval_int(n) * vals[n + s - i] for i, p in enumerate(ps)) != 0]


def test_criterion_01_zeta3_pipeline():
    t = time.perf_counter()
    u, v = apery_zeta3(30)
    d = u[30] / v[30] - hg.zeta3(256)
    err = abs(float(d.mid)) + d.radius_float()
    bad = apery_integrality(200)
    dt = time.perf_counter() - t
    ok = err < 1e-10 and not bad and dt < 5
    assert record(1, ok, f"|u30/v30 - zeta(3)| <= {err:.2e}, integrality failures to 200: {bad}, {dt:.2f}s")


def test_criterion_02_recurrence_transcription():
    t = time.perf_counter()
    z = Fraction(1, 2)
    res = [qd.integral_J(n, z, levels=5, prec=128) for n in range(5)]
    balls = [r.ball() for r in res]
    worst = max(r.error_estimate for r in res)
    rep = verify_annihilates(load_recurrence("j_family"), z, balls)
    dt = time.perf_counter() - t
    ok = bool(rep) and worst < 1e-20 and dt < 60
    assert record(2, ok, f"J0..J4 at z=1/2, quadrature error <= {worst:.1e}, "
                         f"windows {[n for n, _ in rep.windows]} contain 0: {rep.ok}, {dt:.1f}s")


def test_criterion_03_exterior_square():
    jrec, printed = load_recurrence("j_family"), load_recurrence("wedge_printed")
    details, ok = [], True
    for z in (Fraction(1, 2), Fraction(1, 16), Fraction(1, 3)):
        xs = exterior_square(jrec, z)
        w = wedge_pair(z, 60)
        bad = exact_residuals(xs, z, w.A) + exact_residuals(xs, z, w.B)
        try:
            factors = set(cross_division_factors(printed, xs, z, range(3, 23)).values())
        except ValueError:
            factors = set()
        ok &= not bad and len(factors) == 1
        details.append(f"z={z}: residual failures {len(bad)}, factor {sorted(map(str, factors))}")
    assert record(3, ok, "; ".join(details))


def test_criterion_04_initial_values():
    rng = random.Random(20240604)
    ok = True
    zs = []
    for _ in range(10):
        z = Fraction(rng.choice([-1, 1]) * rng.randint(1, 99), rng.randint(1, 99))
        zs.append(z)
        w = wedge_from_coordinates(coordinate_triple(z, 3))
        ok &= w.A[:3] == printed_initial_A(z) and w.B[:3] == printed_initial_B(z)
    assert record(4, ok, f"exact equality at z = {', '.join(map(str, zs))}")


def test_criterion_05_integrality():
    t = time.perf_counter()
    fails = {}
    for zinv in DEFAULT_ZINV:
        f = integrality_report(Fraction(1, zinv), 100).failures()
        if f:
            fails[zinv] = f
    dt = time.perf_counter() - t
    code = cli.main(["integrality", "--n", "100", "--out", str(Path(__file__).parent / ".integrality.json")])
    (Path(__file__).parent / ".integrality.json").unlink(missing_ok=True)
    ok = not fails and dt < 120
    summary = sorted({str(v) for v in fails.values()})
    assert record(5, ok, f"failing (claim, n) per 1/z: {summary} on {len(fails)}/{len(DEFAULT_ZINV)} values, "
                         f"cli exit {code}, {dt:.1f}s")


def test_criterion_06_apery_limit():
    z = Fraction(1, 2)
    w = wedge_pair(z, 80)
    target = (hg.lambda_val(z, 128) / hg.rho1(z, 128)).mid
    err = abs(float(apery_limit(w.B[:61], w.A[:61], 128).value.mid - target))
    rate, pred = apery_limit(w.B, w.A, 128).rate, predicted_rate(z)
    rel = abs(rate / pred - 1)
    ok = err < 1e-10 and rel < 0.10
    assert record(6, ok, f"|B60/A60 - lambda/rho1| = {err:.2e}, rate {rate:.6g} vs predicted {pred:.6g} "
                         f"({100 * rel:.2f}% off)")


def test_criterion_07_l_identities():
    t = time.perf_counter()
    ls.load_curves.cache_clear()
    wanted = {"2sqrt2": ("lambda(1/2) = 16 sqrt2 L(E,2)/pi", "rho1(1/2) = 4 sqrt2 L(E,1)"),
              "1": ("lambda(1/16) = 30 L(E,2)/pi", "rho1(1/16) = L(E,chi_-4,1)/2")}
    ok, details = True, []
    for k, names in wanted.items():
        rep = ls.verify_identities(k, 128)
        for c in rep.identity_checks:
            if c.name in names:
                ok &= c.passed
                details.append(f"{c.name}: {c.relative_diff:.1e}")
    dt = time.perf_counter() - t
    ok &= dt < 30
    assert record(7, ok, "; ".join(details) + f"; {dt:.1f}s")


def test_criterion_08_mahler_bridge():
    details, ok = [], True
    for k2, tol in ((1, 1e-8), (4, 1e-8), (9, 1e-8), (25, 1e-6)):
        quad = qd.mahler_mu(k2, levels=7, prec=128).value
        series = hg.mahler_mu_series(k2, 128).mid
        d = abs(float(quad - series))
        ok &= d < tol
        details.append(f"k^2={k2}: {d:.1e}")
    assert record(8, ok, "; ".join(details))


def test_criterion_09_beukers():
    t = time.perf_counter()
    z3 = float(hg.zeta3(64))
    i0 = qd.integral_beukers(0, levels=3).value
    i1 = qd.integral_beukers(1, levels=3).value
    e0, e1 = abs(float(i0) - z3), abs(float(i1) - (5 * z3 - 6))
    dt = time.perf_counter() - t
    ok = e0 < 1e-4 and e1 < 1e-4 and dt < 300
    assert record(9, ok, f"|I0 - zeta(3)| = {e0:.1e}, |I1 - (5 zeta(3) - 6)| = {e1:.1e}, {dt:.1f}s")


def test_criterion_10_relations():
    import mpmath
    import test_relations as tr
    rng = random.Random(2024)
    ctx = mpmath.MPContext()
    ctx.dps = 45
    hits = 0
    for _ in range(100):
        xs, c = tr.planted_case(rng, ctx)
        r = find_relation([ctx.nstr(x, 45) for x in xs], 100, 133)
        hits += bool(r.found and tr.is_multiple(r.coefficients, c))
    z = Fraction(1, 2)
    t = coordinate_triple(z, 1)
    exact = [-1, t.a[1], t.b[1], t.c[1]]
    vals = [qd.integral_J(1, z, 5, 128).value, hg.lambda_val(z, 160).mid, hg.rho1(z, 160).mid, hg.rho2(z, 160).mid]
    got = find_relation(vals, 1000, 160).coefficients
    prop = got is not None and tr.is_multiple(got, exact)
    ok = hits == 100 and prop
    assert record(10, ok, f"planted {hits}/100; J1(1/2) relation {got} vs exact {[str(x) for x in exact]}")


def test_criterion_11_property_suites():
    import test_ball
    import test_hypergeom
    import test_lseries
    import test_quadrature
    curves = ls.load_curves()
    suites = {
        "ball containment under precision doubling": test_ball.test_precision_doubling_containment,
        "hypergeometric containment under precision doubling": test_hypergeom.test_precision_containment_random,
        "Hasse bound": lambda: test_lseries.test_hasse_bound(curves),
        "Hecke multiplicativity": lambda: test_lseries.test_hecke_multiplicativity(curves),
        "quadrature level monotonicity": test_quadrature.test_level_monotonicity,
    }
    status = {}
    for name, fn in suites.items():
        try:
            fn()
            status[name] = "green"
        except AssertionError as exc:
            status[name] = f"red ({exc})"
    ok = all(v == "green" for v in status.values())
    assert record(11, ok, "; ".join(f"{k}: {v}" for k, v in status.items()))


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
