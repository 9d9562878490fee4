"""Command-line front end.

Exit codes: 0 success, 1 a verification failed (an identity, an integrality
claim, an annihilation check, or a data checksum), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import mpmath

from . import hypergeom, lseries, quadrature, relations, sequences
from .exact import RecurrenceData, as_rational, format_recurrence_text
from .recurrence import cross_division_factors, exterior_square, load_recurrence, run

COMMANDS = ("recur", "limits", "integrality", "xsq", "hyper", "quad", "lvalue", "verify", "relate")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MIN_PREC = 64


class UsageError(Exception):
    pass


class ChecksumError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    z: Fraction | None
    k_squared: Fraction | None
    label: str | None
    N: int
    prec_bits: int
    output_format: str
    output_path: str | None


# ---------------------------------------------------------------------------
# embedded data


def verify_data_checksums() -> None:
    pkg = resources.files("apery_lvalues.data")
    for line in pkg.joinpath("checksums.txt").read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        digest, name = line.split()
        actual = hashlib.sha256(pkg.joinpath(name).read_bytes()).hexdigest()
        if actual != digest:
            raise ChecksumError(f"embedded data file {name} fails its checksum")


# ---------------------------------------------------------------------------
# argument helpers


def parse_k(text: str) -> tuple[str | None, Fraction]:
    """Return (label or None, k^2) for --k."""
    if text in lseries.K_LABELS:
        return text, Fraction(lseries.K_LABELS[text])
    try:
        k = as_rational(text) if "/" in text else Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --k value {text!r}") from exc
    if k <= 0:
        raise UsageError("--k must be positive")
    return None, k * k


def _z_from(args, required: bool = True) -> Fraction | None:
    if getattr(args, "z", None) is not None and getattr(args, "zinv", None) is not None:
        raise UsageError("give only one of --z and --zinv")
    if getattr(args, "z", None) is not None:
        try:
            return as_rational(args.z)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --z value {args.z!r}") from exc
    if getattr(args, "zinv", None) is not None:
        zi = args.zinv if isinstance(args.zinv, str) else args.zinv[0]
        try:
            return 1 / as_rational(zi)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --zinv value {zi!r}") from exc
    if required:
        raise UsageError("--z or --zinv is required")
    return None


def _seq_json(values) -> list[dict]:
    return [{"n": i, "numerator": str(v.numerator), "denominator": str(v.denominator)}
            for i, v in enumerate(values)]


def _mp_str(x, prec: int) -> str:
    return mpmath.nstr(x, max(5, int(prec * 0.30103)), strip_zeros=False)


def _quad_json(res: quadrature.QuadratureResult, prec: int) -> dict:
    return {"value": _mp_str(res.value, prec), "error_estimate": res.error_estimate,
            "levels_used": res.levels_used}


# ---------------------------------------------------------------------------
# subcommands; each returns (report, passed)


def cmd_recur(args):
    N = args.n
    name = args.name
    if name in ("apery", "apery_zeta3"):
        rec = load_recurrence("apery_zeta3")
        u = run(rec, 0, [0, 6], N).values
        v = run(rec, 0, [1, 5], N).values
        return {"name": "apery_zeta3", "N": N, "sequences": {"u": _seq_json(u), "v": _seq_json(v)}}, True
    z = _z_from(args)
    if name in ("j", "j_family"):
        t = sequences.coordinate_triple(z, max(N, 2))
        seqs = {"a": t.a[:N + 1], "b": t.b[:N + 1], "c": t.c[:N + 1]}
        return {"name": "j_family", "z": str(z), "N": N,
                "sequences": {k: _seq_json(v) for k, v in seqs.items()}}, True
    if name in ("wedge", "wedge_printed"):
        w = sequences.wedge_pair(z, max(N, 2))
        return {"name": "wedge_printed", "z": str(z), "N": N,
                "sequences": {"A": _seq_json(w.A[:N + 1]), "B": _seq_json(w.B[:N + 1])}}, True
    raise UsageError(f"unknown recurrence {name!r} (apery, j_family, wedge_printed)")


def cmd_limits(args):
    z = _z_from(args)
    if args.n < 3:
        raise UsageError("--n must be >= 3 for limits")
    rep = sequences.limit_report(z, args.n, args.prec)
    ctx = mpmath.MPContext()
    ctx.prec = args.prec + 20
    target = (hypergeom.lambda_val(z, args.prec) / hypergeom.rho1(z, args.prec)) if 0 < abs(z) < 1 else None
    if target is not None:
        rep["lambda_over_rho1"] = target.to_json()["midpoint"]
    passed = all(c["status"] == "pass" for c in rep["claims"])
    return rep, passed


def _integrality_one(zinv: str, N: int) -> dict:
    return sequences.integrality_report(1 / as_rational(zinv), N).to_json()


def cmd_integrality(args):
    if args.z is not None:
        zs = [str(1 / as_rational(args.z))]
    elif args.zinv:
        zs = list(args.zinv)
    else:
        zs = [str(v) for v in sequences.DEFAULT_ZINV]
    for zi in zs:
        q = as_rational(zi)
        if q.denominator != 1 or abs(q) < 2:
            raise UsageError(f"1/z must be an integer with |1/z| >= 2, got {zi}")
    if args.jobs > 1 and len(zs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_integrality_one, zs, [args.n] * len(zs)))
    else:
        reports = [_integrality_one(zi, args.n) for zi in zs]
    report = reports[0] if len(reports) == 1 else {"reports": reports}
    return report, all(r["passed"] for r in reports)


def cmd_xsq(args):
    z = _z_from(args)
    jrec = load_recurrence("j_family")
    xs = exterior_square(jrec, z)
    printed = load_recurrence("wedge_printed")
    N = max(args.n, 10)
    w = sequences.wedge_pair(z, N)
    ok = True
    checks = {}
    for name, vals in (("A", w.A), ("B", w.B)):
        for rec, tag in ((xs, "derived"), (printed, "printed")):
            fails = _exact_residual_failures(rec, z, vals)
            checks[f"{tag}_annihilates_{name}"] = not fails
            ok &= not fails
    sample = list(range(3, 23))
    try:
        factors = cross_division_factors(printed, xs, z, sample)
        distinct = sorted({str(v) for v in factors.values()})
        checks["cross_division_consistent"] = len(distinct) == 1
        ok &= len(distinct) == 1
    except ValueError as exc:
        distinct = [str(exc)]
        checks["cross_division_consistent"] = False
        ok = False
    return {"z": str(z), "N": N, "operator": format_recurrence_text(
        RecurrenceData(xs.name, xs.order, xs.offset, xs.coefficients)), "checks": checks,
            "cross_division_factor": distinct}, ok


def _exact_residual_failures(rec, z, vals) -> list[int]:
    ps = rec.at(z)
    r, s = rec.order, rec.offset
    bad = []
    for n in range(max(r - s, 0), len(vals) - s):
        if n + s - r < 0:
            continue
        if sum(p.eval_int(n) * vals[n + s - i] for i, p in enumerate(ps)) != 0:
            bad.append(n)
    return bad


HYPER = ("lambda", "rho1", "rho2", "f", "zeta3", "pi", "mu")


def cmd_hyper(args):
    what, prec = args.what, args.prec
    if what == "pi":
        ball = hypergeom.pi_val(prec)
    elif what == "zeta3":
        ball = hypergeom.zeta3(prec)
    elif what == "mu":
        if args.k is None:
            raise UsageError("--k is required for mu")
        _, k2 = parse_k(args.k)
        ball = hypergeom.mahler_mu_series(k2, prec)
    else:
        z = _z_from(args)
        fn = {"lambda": hypergeom.lambda_val, "rho1": hypergeom.rho1,
              "rho2": hypergeom.rho2, "f": hypergeom.f_val}[what]
        ball = fn(z, prec)
    return {"quantity": what, "prec": prec, **ball.to_json()}, True


QUAD = ("J", "beukers", "L", "sigma2", "rho1", "rho2", "f1", "f2", "fZ", "mahler")


def cmd_quad(args):
    what, prec, levels = args.what, args.prec, args.levels
    if what == "beukers":
        res = quadrature.integral_beukers(args.n, levels=levels or 3, prec=prec)
    elif what == "mahler":
        if args.k is None:
            raise UsageError("--k is required for mahler")
        _, k2 = parse_k(args.k)
        res = quadrature.mahler_mu(k2, levels=levels or 7, prec=prec)
    else:
        z = _z_from(args)
        lv = levels or 6
        if what == "J":
            res = quadrature.integral_J(args.n, z, lv, prec)
        elif what == "L":
            res = quadrature.integral_L(args.n, 1 / z, lv, prec)
        elif what == "sigma2":
            res = quadrature.integral_sigma2(1 / z, lv, prec)
        elif what == "rho1":
            res = quadrature.rho1_integral(z, lv, prec)
        elif what == "rho2":
            res = quadrature.rho2_integral(z, lv, prec)
        elif what == "f1":
            res = quadrature.f_integral_1d(z, lv, prec)
        elif what == "f2":
            res = quadrature.f_integral_2d(z, lv, prec)
        else:
            res = quadrature.f_integral_Z(1 / z, lv, prec)
    return {"quantity": what, "prec": prec, **_quad_json(res, prec)}, True


def cmd_lvalue(args):
    curves = lseries.load_curves()
    if args.label not in curves:
        raise UsageError(f"unknown curve label {args.label!r}; known: {', '.join(curves)}")
    c = curves[args.label]
    series = lseries.curve_lseries(c, args.prec)
    eps = series.sign(args.prec)
    out = {"label": c.label, "conductor": c.conductor, "epsilon": eps,
           "horizon": len(series.coeffs) - 1,
           "L1": _mp_str(series.value(1, eps, args.prec), args.prec),
           "L2": _mp_str(series.value(2, eps, args.prec), args.prec)}
    if c.conductor % 2:
        tw = lseries.twisted_lseries(c, args.prec)
        out["L1_twist_chi_-4"] = _mp_str(tw.value(1, tw.sign(args.prec), args.prec), args.prec)
    return out, True


def cmd_verify(args):
    if args.k not in lseries.K_LABELS:
        raise UsageError(f"--k must be one of {', '.join(lseries.K_LABELS)}")
    rep = lseries.verify_identities(args.k, args.prec)
    return rep.to_json(), rep.passed


def cmd_relate(args):
    if not args.values:
        raise UsageError("--values <file> is required")
    try:
        with open(args.values, encoding="utf-8") as fh:
            vals = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    try:
        res = relations.find_relation(vals, args.max_norm, args.prec)
    except relations.InsufficientPrecision as exc:
        raise UsageError(str(exc)) from exc
    return {"values": vals, "max_norm": args.max_norm, "prec": args.prec, **res.to_json()}, True


HANDLERS = {
    "recur": cmd_recur, "limits": cmd_limits, "integrality": cmd_integrality, "xsq": cmd_xsq,
    "hyper": cmd_hyper, "quad": cmd_quad, "lvalue": cmd_lvalue, "verify": cmd_verify,
    "relate": cmd_relate,
}


# ---------------------------------------------------------------------------
# self tests: small exact facts per subcommand


PI_40 = "3.1415926535897932384626433832795028841971"


def _zeta3_check() -> bool:
    u, v = sequences.apery_zeta3(30)
    return hypergeom.zeta3(80).inflate(Fraction(1, 10 ** 10)).contains(u[30] / v[30])


def _selftests(command: str) -> list[tuple[str, bool]]:
    if command == "recur":
        u, v = sequences.apery_zeta3(2)
        return [("v = 1, 5, 73", v == [1, 5, 73]), ("u = 0, 6, 351/4", u == [0, 6, Fraction(351, 4)])]
    if command == "limits":
        lim = sequences.apery_limit([3, 3, 3], [1, 1, 1])
        return [("constant quotient has rate 0", lim.rate == 0.0 and float(lim.value) == 3.0)]
    if command == "integrality":
        t = sequences.coordinate_triple(Fraction(1, 16), 2)
        return [("(a0, b0, c0) = (1, 0, 0)", (t.a[0], t.b[0], t.c[0]) == (1, 0, 0)),
                ("z 2^4 a_1 = -208 at z = 1/16", Fraction(1, 16) * 16 * t.a[1] == -208)]
    if command == "xsq":
        w = sequences.wedge_pair(1, 2)
        return [("A_0 = 13/2 at z = 1", w.A[0] == Fraction(13, 2)), ("B_0 = 0", w.B[0] == 0),
                ("B_1 = 0 at z = 1", w.B[1] == 0)]
    if command == "hyper":
        return [("pi ball contains pi", hypergeom.pi_val(80).contains(Fraction(PI_40))),
                ("zeta(3) ball contains u_30/v_30 up to 1e-10", _zeta3_check())]
    if command == "quad":
        res = quadrature.tanh_sinh(lambda x, xc: 1 / mpmath.sqrt(x * xc), levels=5, prec=64)
        return [("int dx/sqrt(x(1-x)) = pi", abs(res.value - mpmath.pi) < 1e-15)]
    if command == "lvalue":
        c = lseries.load_curves()["32a1"]
        a = lseries.hecke_coeffs(c, 10).a
        return [("a_1 = 1", a[1] == 1), ("a_6 = a_2 a_3", a[6] == a[2] * a[3])]
    if command == "verify":
        return [("chi_-4 vanishes on even n", all(lseries.chi_minus4(2 * m) == 0 for m in range(20)))]
    if command == "relate":
        phi = (1 + mpmath.sqrt(5)) / 2
        r = relations.find_relation([1, phi, phi * phi], 100, 128)
        return [("golden ratio relation", r.coefficients == [1, 1, -1])]
    return []


# ---------------------------------------------------------------------------
# output


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _flatten(report):
        w.writerow([k, "" if v is None else v])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="apery-lvalues",
                                description="Apery limits, hypergeometric values and elliptic L-values.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, z=True, n=True, nd=20):
        sp.add_argument("--prec", type=int, default=128, help="working precision in bits (>= 64)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument("--selftest", action="store_true", help="run the built-in small examples")
        if z:
            sp.add_argument("--z", help="rational z, e.g. 1/2")
        if n:
            sp.add_argument("--n", type=int, default=nd, help="last index N")

    sp = sub.add_parser("recur", help="run a bundled recurrence exactly")
    common(sp)
    sp.add_argument("--zinv")
    sp.add_argument("--name", default="apery", help="apery, j_family or wedge_printed")

    sp = sub.add_parser("limits", help="B_n/A_n limit and rate")
    common(sp, nd=60)
    sp.add_argument("--zinv")

    sp = sub.add_parser("integrality", help="check the integrality displays")
    common(sp, nd=100)
    sp.add_argument("--zinv", nargs="+", help="one or more integers 1/z (default: the standard set)")

    sp = sub.add_parser("xsq", help="exterior square of the J_n recurrence")
    common(sp, nd=60)
    sp.add_argument("--zinv")

    sp = sub.add_parser("hyper", help="certified hypergeometric values")
    common(sp, n=False)
    sp.add_argument("--zinv")
    sp.add_argument("--k")
    sp.add_argument("--what", choices=HYPER, default="lambda")

    sp = sub.add_parser("quad", help="tanh-sinh integrals")
    common(sp, nd=0)
    sp.add_argument("--zinv")
    sp.add_argument("--k")
    sp.add_argument("--levels", type=int)
    sp.add_argument("--what", choices=QUAD, default="J")

    sp = sub.add_parser("lvalue", help="L(E,1), L(E,2) for a bundled curve")
    common(sp, z=False, n=False)
    sp.add_argument("--label", default="32a1")

    sp = sub.add_parser("verify", help="Mahler measure and L-value identities")
    common(sp, z=False, n=False)
    sp.add_argument("--k", default="2sqrt2", help="1, sqrt2, 2, 2sqrt2 or 3")

    sp = sub.add_parser("relate", help="integer relation search")
    common(sp, z=False, n=False)
    sp.add_argument("--values", help="file with one decimal value per line")
    sp.add_argument("--max-norm", type=int, default=10 ** 6)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        verify_data_checksums()
    except ChecksumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.selftest:
        results = _selftests(args.command)
        report = {"command": args.command, "selftest": [{"name": n, "passed": ok} for n, ok in results]}
        passed = all(ok for _, ok in results)
    else:
        try:
            if args.prec < MIN_PREC:
                raise UsageError(f"--prec must be >= {MIN_PREC}")
            if getattr(args, "n", 0) is not None and getattr(args, "n", 0) < 0:
                raise UsageError("--n must be >= 0")
            if args.jobs < 1:
                raise UsageError("--jobs must be >= 1")
            report, passed = HANDLERS[args.command](args)
        except UsageError as exc:
            print(f"usage error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{args.command}: {'ok' if passed else 'VERIFICATION FAILED'}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
