"""Command-line front end: ``ruledpack <command> [flags]``.

Exit codes: 0 success, 1 domain error (bad input), 2 internal failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from decimal import Decimal, localcontext
from fractions import Fraction

from . import checks
from .ech import ellipsoid_caps, embeds_ellipsoid_in_polydisk, polydisk_caps
from .exact import QuadExt, format_number, parse_number, to_qx
from .lattice import format_class, is_exceptional_type, pairing, parse_class
from .recurrence import initial_state, orbit_csv, orbit_trace
from .reducer import (
    BundleSpec,
    IterationBudgetExhausted,
    Verdict,
    ball_vector,
    obstruction_from_outcome,
    reduce,
    width_by_bisection,
)
from .widths import obstructions, packing_number, stability, width_at

SCHEMA_VERSION = 1


class DomainError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise DomainError(message)


def _rational(text: str) -> Fraction:
    try:
        x = parse_number(text)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"cannot parse {text!r} as an exact number") from None
    if isinstance(x, QuadExt):
        if not x.is_rational:
            raise DomainError(f"expected a rational number, got {text!r}")
        return x.a
    return Fraction(x)


def _pair(text: str):
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise DomainError(f"expected two comma-separated numbers, got {text!r}")
    return tuple(_rational(p.strip()) for p in parts)


def _digits(text: str) -> int:
    if text.startswith("digits="):
        text = text[len("digits="):]
    n = int(text)
    if n < 1:
        raise DomainError("--approx needs a positive digit count")
    return n


def approx(x, digits: int) -> str:
    """Decimal rendering of an exact value, for display only."""
    x = to_qx(x)
    with localcontext() as ctx:
        ctx.prec = digits + 20
        val = Decimal(x.a.numerator) / Decimal(x.a.denominator)
        if x.b:
            val += Decimal(x.b.numerator) / Decimal(x.b.denominator) * Decimal(x.d).sqrt()
        return str(val.quantize(Decimal(1).scaleb(-digits)))


def _emit_json(out, payload: dict):
    out.write(json.dumps({"schemaVersion": SCHEMA_VERSION, **payload}) + "\n")


def _emit_csv(out, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    out.write(buf.getvalue())


def _bundle(args) -> BundleSpec:
    try:
        return BundleSpec(args.bundle, args.mu)
    except ValueError as exc:
        raise DomainError(str(exc)) from None


# commands -------------------------------------------------------------------

def cmd_reduce(args, out):
    v = parse_class(args.cls)
    o = reduce(v, args.max_iter)
    payload = {
        "verdict": o.verdict.value,
        "reason": o.reason,
        "input": format_class(v),
        "reduced": format_class(o.final_class),
        "cremonaMoves": o.iterations,
    }
    if o.verdict is Verdict.BOUNDARY:
        E = obstruction_from_outcome(o, args.zero_index)
        payload["obstruction"] = format_class(E)
        payload["obstructionPairing"] = format_number(pairing(E, v))
    if args.trace:
        payload["trace"] = o.trace_records()
    _emit_json(out, payload)


def cmd_width(args, out):
    b = _bundle(args)
    if args.method == "bisect":
        lo, hi = width_by_bisection(b, args.k, args.denom)
        w = width_at(b, args.k)
        payload = {"bracket": [format_number(lo), format_number(hi)],
                   "closedForm": format_number(w),
                   "contains": QuadExt(lo) <= w <= QuadExt(hi)}
        if args.approx:
            payload["approx"] = [approx(lo, args.approx), approx(hi, args.approx)]
        _emit_json(out, payload)
        return
    w = width_at(b, args.k)
    out.write(format_number(w) + (f" {approx(w, args.approx)}" if args.approx else "") + "\n")


def cmd_packing(args, out):
    p = packing_number(_bundle(args), args.k)
    out.write(format_number(p) + (f" {approx(p, args.approx)}" if args.approx else "") + "\n")


def cmd_stability(args, out):
    out.write(f"{stability(_bundle(args), args.parity)}\n")


def cmd_obstructions(args, out):
    b = _bundle(args)
    obs = obstructions(b, args.k)
    w = width_at(b, args.k)
    _emit_json(out, {
        "width": format_number(w),
        "reason": obs.reason,
        "classes": [
            {"class": format_class(E), "exceptional": is_exceptional_type(E),
             "pairingAtWidth": format_number(pairing(ball_vector(b, args.k, w), E))}
            for E in obs
        ],
    })


def cmd_ech_caps(args, out):
    x, y = _pair(args.params)
    fn = ellipsoid_caps if args.shape == "ellipsoid" else polydisk_caps
    vals = fn(x, y, args.count)
    header = ["index", "value"] + (["approx"] if args.approx else [])
    rows = [[i, format_number(v)] + ([approx(v, args.approx)] if args.approx else [])
            for i, v in enumerate(vals)]
    _emit_csv(out, header, rows)


def cmd_embed(args, out):
    a, b = _pair(args.ellipsoid)
    s, t = _pair(args.polydisk)
    _emit_json(out, embeds_ellipsoid_in_polydisk(a, b, s, t, args.prefix).to_json())


def cmd_orbit(args, out):
    if args.p < 4:
        raise DomainError("--p must be at least 4")
    states = orbit_trace(args.p, initial_state(args.p, args.mu, args.c), args.steps - 1)
    out.write(orbit_csv(states))


def cmd_sweep(args, out):
    if args.step <= 0 or args.mu_to < args.mu_from:
        raise DomainError("need step > 0 and mu-to >= mu-from")
    rows = []
    mu = args.mu_from
    while mu <= args.mu_to:
        try:
            w = width_at(BundleSpec(args.bundle, mu), args.k)
        except ValueError as exc:
            raise DomainError(str(exc)) from None
        rows.append([format_number(mu), format_number(w)] + ([approx(w, args.approx)] if args.approx else []))
        mu += args.step
    _emit_csv(out, ["mu", "w"] + (["approx"] if args.approx else []), rows)


def cmd_verify(args, out):
    kwargs = {}
    if args.suite in ("identities", "ech"):
        if args.p is not None:
            kwargs["p_values"] = [args.p]
        if args.n_max is not None:
            kwargs["n_max"] = args.n_max
    results = checks.SUITES[args.suite](**kwargs)
    for c in results:
        out.write(c.line() + "\n")
    failed = sum(not c.ok for c in results)
    out.write(f"{len(results) - failed}/{len(results)} passed\n")
    return 0 if not failed else 2


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ruledpack", description="Exact ball-packing widths of the two S^2-bundles over S^2.")
    ap.add_argument("--approx", type=_digits, metavar="N", help="add a decimal rendering with N digits")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_bundle(p, k=True):
        p.add_argument("--bundle", choices=["trivial", "twisted"], required=True)
        p.add_argument("--mu", type=_rational, required=True)
        if k:
            p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("reduce", help="run the Cremona reduction on a class")
    p.add_argument("--class", dest="cls", required=True, help='e.g. "3; 1, 1, 1" or "7; 4, 3, 2^6, 1"')
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--zero-index", type=int, default=None)
    p.add_argument("--trace", action="store_true", help="include every move in the output")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("width", help="k-ball width")
    with_bundle(p)
    p.add_argument("--method", choices=["closed", "bisect"], default="closed")
    p.add_argument("--denom", type=int, default=2**40)
    p.set_defaults(fn=cmd_width)

    p = sub.add_parser("packing", help="packing number")
    with_bundle(p)
    p.set_defaults(fn=cmd_packing)

    p = sub.add_parser("stability", help="stability number")
    with_bundle(p, k=False)
    p.add_argument("--parity", choices=["odd", "even", "all"], default="all")
    p.set_defaults(fn=cmd_stability)

    p = sub.add_parser("obstructions", help="classes cutting out the width")
    with_bundle(p)
    p.set_defaults(fn=cmd_obstructions)

    p = sub.add_parser("ech-caps", help="ECH capacities as CSV")
    p.add_argument("--shape", choices=["ellipsoid", "polydisk"], required=True)
    p.add_argument("--params", required=True, help="a,b")
    p.add_argument("--count", type=int, required=True)
    p.set_defaults(fn=cmd_ech_caps)

    p = sub.add_parser("embed", help="ellipsoid into polydisk")
    p.add_argument("--ellipsoid", required=True, help="a,b")
    p.add_argument("--polydisk", required=True, help="s,t")
    p.add_argument("--prefix", type=int, default=None)
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("orbit", help="(R, S) orbit as CSV")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--mu", type=_rational, required=True)
    p.add_argument("--c", type=_rational, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(fn=cmd_orbit)

    p = sub.add_parser("sweep", help="(mu, w) table as CSV")
    p.add_argument("--bundle", choices=["trivial", "twisted"], required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mu-from", type=_rational, required=True)
    p.add_argument("--mu-to", type=_rational, required=True)
    p.add_argument("--step", type=_rational, required=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", help="run a self-check suite")
    p.add_argument("--suite", choices=sorted(checks.SUITES), required=True)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "k", None) is not None and args.k < 1:
            raise DomainError("--k must be positive")
        rc = args.fn(args, out)
        return rc or 0
    except (DomainError, ValueError, ZeroDivisionError, IterationBudgetExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # --help
        return 0 if not exc.code else 1
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
