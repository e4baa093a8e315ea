"""Command line interface: wiltonlab cf|eval|oracle|table|check|calibrate."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

import numpy as np

from . import autocorr, bernoulli, contfrac, divisor, harness, special

REAL_ARG = ("A", "F", "upsilon", "delta-div")
FUNCTIONS = ("A", "F", "W", "wilton", "Phi", "brjuno", "criterion", "G", "delta", "upsilon",
             "phi1", "phi2", "psi1", "delta-div")


def _real(x) -> float:
    return x.approx() if isinstance(x, contfrac.CFExpansion) else float(x)


def _parse_x(text: str):
    try:
        return contfrac.parse_spec(text)
    except (ValueError, ZeroDivisionError):
        raise SystemExit(f"cannot read x = {text!r}; use p/q, a decimal, golden, sqrt2m1 "
                         "or periodic:a1,a2,...")


def evaluate(fn: str, x, v: float | None = None, tol: float | None = None,
             method: str = "direct", K: int = 60) -> dict:
    """One evaluation as a JSON-ready record."""
    if fn == "A":
        r = autocorr.A(_real(x), method, tol)
        return {"value": r.value, "err_estimate": r.err_estimate, "method": r.method}
    if fn == "F":
        val, err = autocorr.F_value(_real(x))
        return {"value": val, "err_estimate": err}
    if fn in ("W", "wilton", "Phi", "brjuno"):
        r = (special.wilton if fn in ("W", "wilton") else special.brjuno)(x, K)
        return {"value": r.partial, "terms": r.K, "tail_estimate": r.tail_estimate,
                "enclosure": r.enclosure, "converged": r.converged}
    if fn == "criterion":
        tr = special.criterion(x, K)
        return {"terms": list(tr.terms), "partial_sums": list(tr.partial_sums),
                "cauchy_gap": tr.cauchy_gap()}
    if fn == "G":
        r = special.G(x, tol or 1e-9)
        return {"value": r.value, "bound": r.tail_bound, "terms": r.terms_used}
    if fn == "delta":
        return {"value": special.delta(x)}
    if fn == "upsilon":
        r = special.upsilon(_real(x), tol or 1e-6)
        return {"value": r.value, "bound": r.tail_bound}
    if fn == "phi1":
        return {"value": bernoulli.phi1_partial(x, v or 1e4), "v": v or 1e4}
    if fn == "phi2":
        r = bernoulli.phi2(x, tol or 1e-8)
        return {"value": r.value, "tail_bound": r.tail_bound, "terms": r.terms_used}
    if fn == "psi1":
        v = v or 1e4
        return {"value": divisor.psi1_partial(x, v, divisor.tau_sieve(int(v))), "v": v}
    if fn == "delta-div":
        return {"value": divisor.dirichlet_remainder(_real(x))}
    raise ValueError(f"unknown function {fn!r}")


def _cmd_cf(args) -> int:
    x = _parse_x(args.x)
    if isinstance(x, Fraction):
        x = contfrac.as_expansion(x)
    n = args.K if args.action == "orbit" else args.terms
    quotients = x.take(n)
    conv = contfrac.convergents(x, len(quotients))
    rec = {"quotients": quotients, "depth": x.depth,
           "convergents": [{"p": p, "q": q} for p, q in zip(conv.p, conv.q)]}
    if args.action == "orbit":
        rec["orbit"] = contfrac.orbit(x, args.K).to_dict()
    print(json.dumps(rec, indent=1 if args.action == "orbit" else None))
    return 0


def _cmd_eval(args) -> int:
    if args.fn in REAL_ARG and args.x not in ("golden", "sqrt2m1") and not args.x.startswith("periodic:"):
        try:
            x = float(Fraction(args.x))
        except (ValueError, ZeroDivisionError):
            raise SystemExit(f"cannot read x = {args.x!r}")
    else:
        x = _parse_x(args.x)
    rec = evaluate(args.fn, x, args.v, args.tol, args.method, args.K)
    print(json.dumps(dict({"fn": args.fn, "x": args.x}, **rec)))
    return 0


def _cmd_oracle(args) -> int:
    failures = 0
    for m in range(1, args.max + 1):
        for n in range(1, args.max + 1):
            try:
                val = bernoulli.landau_inner(m, n)
                status = "PASS"
            except bernoulli.InvariantViolation as exc:
                val, status = str(exc), "FAIL"
                failures += 1
            print(f"{m} {n} {val} {status}")
    print(f"{'PASS' if not failures else 'FAIL'}: {args.max ** 2 - failures}/{args.max ** 2}")
    return 1 if failures else 0


def _cmd_table(args) -> int:
    if args.step:
        n = int(round((args.stop - args.start) / args.step)) + 1
        xs = args.start + args.step * np.arange(n)
    else:
        xs = np.linspace(args.start, args.stop, args.n)
    if args.fn == "criterion":
        raise ValueError("criterion returns a trace; use eval")
    out = open(args.file, "w", newline="", encoding="utf-8") if args.file else sys.stdout
    try:
        if args.out == "csv":
            w = csv.writer(out, lineterminator="\r\n")
            keys = None
            for x in xs:
                rec = evaluate(args.fn, float(x), args.v, args.tol, args.method, args.K)
                if keys is None:
                    keys = list(rec)
                    head = ["lambda" if args.fn == "A" else "x"]
                    w.writerow(head + ["err" if k == "err_estimate" else k for k in keys])
                w.writerow([format(float(x), ".17g")] + [
                    format(rec[k], ".17g") if isinstance(rec[k], float) else rec[k] for k in keys])
        else:
            rows = [dict({"x": float(x)}, **evaluate(args.fn, float(x), args.v, args.tol,
                                                     args.method, args.K)) for x in xs]
            json.dump({"schema": 1, "fn": args.fn, "rows": rows}, out, indent=1)
            out.write("\n")
    finally:
        if args.file:
            out.close()
    return 0


def _cmd_check(args) -> int:
    names = list(harness.SUITES) if args.suite == "all" else [args.suite]
    config = {"vmax": args.vmax}
    failed = False
    chunks = []
    for name in names:
        report = harness.run_suite(name, config)
        failed |= not report.passed
        if args.out == "json":
            chunks.append(report.to_json())
        elif args.out == "csv":
            text = report.to_csv()
            chunks.append(text if not chunks else text.split("\r\n", 1)[1])
        else:
            status = "PASS" if report.passed else "FAIL"
            chunks.append(f"{status} {name}: {len(report.cases) - len(report.failures)}"
                          f"/{len(report.cases)} cases\n")
            for c in report.failures:
                chunks.append(f"  {c.inputs} residual={c.residual:.3g} bound={c.bound:.3g}\n")
    text = "".join(chunks) if args.out != "json" else "\n".join(chunks) + "\n"
    if args.file:
        with open(args.file, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if failed else 0


def _cmd_calibrate(args) -> int:
    name = "all" if args.all or not args.name else args.name
    result = harness.calibrate(name, args.out)
    print(json.dumps(result, indent=1, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wiltonlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    cf = sub.add_parser("cf", help="continued fraction expansion and Gauss orbit")
    cf.add_argument("action", choices=("expand", "orbit"))
    cf.add_argument("x", help="p/q, decimal, golden, sqrt2m1 or periodic:a1,a2,...")
    cf.add_argument("--terms", type=int, default=20)
    cf.add_argument("--depth", "--K", dest="K", type=int, default=10)
    cf.set_defaults(func=_cmd_cf)

    ev = sub.add_parser("eval", help="evaluate one function at one point")
    ev.add_argument("--fn", choices=FUNCTIONS, required=True)
    ev.add_argument("--x", required=True)
    ev.add_argument("--v", type=float)
    ev.add_argument("--tol", type=float)
    ev.add_argument("--method", default="direct", choices=autocorr.METHODS + ("phi2", "series", "delta"))
    ev.add_argument("--depth", "--K", dest="K", type=int, default=60)
    ev.set_defaults(func=_cmd_eval)

    orc = sub.add_parser("oracle", help="exact oracles")
    orc.add_argument("which", choices=("landau",))
    orc.add_argument("--max", type=int, default=30)
    orc.set_defaults(func=_cmd_oracle)

    tb = sub.add_parser("table", help="tabulate a function on a uniform grid")
    tb.add_argument("--fn", choices=FUNCTIONS, required=True)
    tb.add_argument("--from", dest="start", type=float, default=0.0)
    tb.add_argument("--to", dest="stop", type=float, default=1.0)
    tb.add_argument("--n", type=int, default=101)
    tb.add_argument("--step", type=float, help="grid spacing (overrides --n)")
    tb.add_argument("--v", type=float)
    tb.add_argument("--tol", type=float)
    tb.add_argument("--method", default="direct", choices=autocorr.METHODS + ("phi2", "series", "delta"))
    tb.add_argument("--depth", "--K", dest="K", type=int, default=60)
    tb.add_argument("--out", choices=("csv", "json"), default="csv")
    tb.add_argument("--file")
    tb.set_defaults(func=_cmd_table)

    ck = sub.add_parser("check", help="run an identity suite (exit 1 if any case fails)")
    ck.add_argument("--suite", choices=list(harness.SUITES) + ["all"], required=True)
    ck.add_argument("--out", choices=("text", "json", "csv"), default="text")
    ck.add_argument("--vmax", type=float, default=1e5)
    ck.add_argument("--file")
    ck.set_defaults(func=_cmd_check)

    cal = sub.add_parser("calibrate", help="measure the frozen constants on their grids")
    cal.add_argument("--all", action="store_true")
    cal.add_argument("--name", choices=list(harness.CALIBRATIONS))
    cal.add_argument("--out", help="JSON file to merge the constants into")
    cal.set_defaults(func=_cmd_calibrate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, MemoryError) as exc:
        print(f"wiltonlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
