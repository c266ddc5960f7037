"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 a theorem-backed bound was violated,
3 I/O error.  Field elements are always printed as integer codes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager
from typing import Optional, Sequence

import numpy as np

from . import harmonic, survey
from .diagonal import DiagonalInstance, count_solutions, small_bound_table
from .errors import BoundViolation, FiniteFieldError
from .field import CEILING, FiniteField, construct_field, prime_power
from .polynomial import DensePolynomial
from .power_sums import coverage_report

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_IO = 0, 1, 2, 3

FOURIER_TOLERANCE = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("human", "json-lines"), default="human")
    common.add_argument("--out", help="write output here instead of stdout")

    fieldopts = _Parser(add_help=False)
    fieldopts.add_argument("--q", type=int, help="field order (prime power)")
    fieldopts.add_argument("--p", type=int, help="characteristic")
    fieldopts.add_argument("--r", type=int, help="extension degree (with --p)")

    coeffs = _Parser(add_help=False)
    coeffs.add_argument("--a", type=int, default=1)
    coeffs.add_argument("--b", type=int, default=1)

    parser = _Parser(prog="ffsums", description="Sums of powers in finite fields.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coverage", parents=[common, fieldopts, coeffs], help="is every c = a x^d + b y^d?")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--method", choices=("brute", "constructive-weber", "constructive-cauchy"), default="brute")
    p.add_argument("--witnesses", action="store_true", help="include the witness table")

    p = sub.add_parser("witness", parents=[common, fieldopts, coeffs], help="witness c via the averaging argument")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--mode", choices=("auto", "averaging", "direct"), default="auto")

    p = sub.add_parser("count", parents=[common, fieldopts, coeffs], help="N(c) for a x^d + b y^d = c")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c", type=int, help="right-hand side (default: every c)")

    p = sub.add_parser("small", parents=[common, fieldopts], help="check |N(b) - q| <= (delta-1)^2 sqrt(q)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c", type=int, help="right-hand side b (default: every nonzero b)")

    p = sub.add_parser("weil", parents=[common, fieldopts], help="Weil sum against (d-1) sqrt(q)")
    p.add_argument("--poly", type=_int_list, required=True, help="coefficients, constant first")
    p.add_argument("--d", type=int, help="expected degree of --poly")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--label", type=int, default=None, help="character label (default 1)")
    g.add_argument("--all-characters", action="store_true")

    for name in ("lemma8", "lemma12"):
        p = sub.add_parser(name, parents=[common, fieldopts], help=f"verify the {name} averaging bound")
        p.add_argument("--d", type=int)
        if name == "lemma8":
            p.add_argument("--c", type=int, default=1)
        else:
            p.add_argument("--poly", type=_int_list)
        p.add_argument("--set-a", type=_int_list, help="explicit set A (codes)")
        p.add_argument("--set-b", type=_int_list, help="explicit set B (codes)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("sweep", parents=[common], help="run a sweep and write JSON lines")
    p.add_argument("--qmin", type=int, default=2)
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--d", type=_int_list, required=True, help="comma-separated exponents")
    p.add_argument("--checks", type=_str_list, default=["coverage"])
    p.add_argument("--seed", type=int)
    p.add_argument("--coefficients", choices=survey.COEFFICIENT_MODES, default="unit")
    p.add_argument("--k", type=int, default=32, help="pairs per field in sampled-k mode")
    p.add_argument("--no-certificate", action="store_true", help="brute-force even above the threshold")
    p.add_argument("--weil-samples", type=int, default=200)
    p.add_argument("--lemma-samples", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="record wall times (breaks byte-identity)")

    p = sub.add_parser("exceptional", parents=[common], help="fields where x^d + y^d misses an element")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--no-certificate", action="store_true")

    p = sub.add_parser("fourier-selftest", parents=[common, fieldopts], help="inversion and Plancherel checks")
    p.add_argument("--qmin", type=int)
    p.add_argument("--qmax", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)
    return parser


# --- validation ----------------------------------------------------------------


def _field(args) -> FiniteField:
    if args.q is not None:
        if args.p is not None or args.r is not None:
            raise UsageError("--q is mutually exclusive with --p/--r")
        pr = prime_power(args.q)
        if pr is None:
            raise UsageError(f"--q {args.q} is not a prime power")
        if args.q > CEILING:
            raise UsageError(f"--q exceeds the ceiling {CEILING}")
        return construct_field(*pr)
    if args.p is None:
        raise UsageError("give --q or --p [--r]")
    r = 1 if args.r is None else args.r
    if r < 1:
        raise UsageError("--r must be >= 1")
    if prime_power(args.p) != (args.p, 1):
        raise UsageError(f"--p {args.p} is not prime")
    if args.p**r > CEILING:
        raise UsageError(f"p^r exceeds the ceiling {CEILING}")
    return construct_field(args.p, r)


def _code(field: FiniteField, value: int, name: str, nonzero: bool = False):
    if not 0 <= value < field.q:
        raise UsageError(f"--{name} must be a code in [0, {field.q})")
    if nonzero and value == 0:
        raise UsageError(f"--{name} must be nonzero")
    return field(value)


def _exponent(d: Optional[int], name: str = "d") -> int:
    if d is None or d < 1:
        raise UsageError(f"--{name} must be a positive integer")
    return d


def _poly(field: FiniteField, coeffs: list[int]) -> DensePolynomial:
    for c in coeffs:
        if not 0 <= c < field.q:
            raise UsageError(f"--poly coefficient {c} outside [0, {field.q})")
    return DensePolynomial(field, coeffs)


# --- output ----------------------------------------------------------------------


def _record(field, d, a, b, check, outcome, payload) -> dict:
    if check not in survey.RECORD_CHECKS:
        raise AssertionError(check)
    rec = {
        "q": field.q, "p": field.p, "r": field.r, "d": d, "a": a, "b": b,
        "check": check, "outcome": outcome, "payload": survey._canonical(payload),
        "wall_time_micros": None,
    }
    return rec


def _render(rec: dict, fmt: str) -> str:
    if fmt == "json-lines":
        return json.dumps(rec, separators=(",", ":"))
    head = " ".join(f"{k}={_human(rec[k])}" for k in ("check", "q", "p", "r", "d", "a", "b", "outcome"))
    body = " ".join(f"{k}={_human(v)}" for k, v in rec["payload"].items())
    return f"{head} {body}".rstrip()


def _human(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


@contextmanager
def _sink(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


# --- commands --------------------------------------------------------------------


def _cmd_coverage(args):
    field = _field(args)
    d = _exponent(args.d)
    a, b = _code(field, args.a, "a", True), _code(field, args.b, "b", True)
    if args.method != "brute" and d != 2:
        raise UsageError(f"--method {args.method} needs --d 2")
    if args.method == "constructive-cauchy" and field.p == 2:
        raise UsageError("constructive-cauchy needs odd characteristic")

    def run():
        rep = coverage_report(field, d, a, b, method=args.method)
        payload = {"covered": rep.covered, "unrepresented": rep.unrepresented_codes, "method": rep.method}
        if args.witnesses:
            payload["witnesses"] = {
                str(c.value): [x.value, y.value] for c, (x, y) in sorted(rep.witnesses.items())
            }
        outcome = "pass" if rep.covered else "exceptional"
        if not rep.covered and d == 2:
            outcome = "fail"
        return [_record(field, d, a.value, b.value, "coverage", outcome, payload)]

    return run


def _cmd_witness(args):
    field = _field(args)
    d = _exponent(args.d)
    a, b = _code(field, args.a, "a", True), _code(field, args.b, "b", True)
    c = _code(field, args.c, "c", True)

    def run():
        from .errors import NoWitness

        try:
            w = survey.witness_by_averaging(field, d, a, b, c, mode=args.mode)
        except NoWitness:
            payload = {"c": c.value, "found": False}
            return [_record(field, d, a.value, b.value, "witness", "exceptional", payload)]
        payload = {
            "c": c.value, "found": True, "g": w.g.value, "x": w.x.value, "y": w.y.value,
            "method": w.method, "claim_holds": w.claim_holds,
        }
        return [_record(field, d, a.value, b.value, "witness", "pass", payload)]

    return run


def _cmd_count(args):
    field = _field(args)
    d = _exponent(args.d)
    a, b = _code(field, args.a, "a", True), _code(field, args.b, "b", True)
    rhs = [args.c] if args.c is not None else list(range(field.q))
    for c in rhs:
        _code(field, c, "c")

    def run():
        out = []
        for c in rhs:
            res = count_solutions(DiagonalInstance.two_term(field, d, field(c), a, b))
            payload = {"rhs": c, "count": res.count, "delta": res.delta}
            if c != 0:
                payload["bound_slack"] = res.bound_slack
            out.append(_record(field, d, a.value, b.value, "count", "pass", payload))
        return out

    return run


def _cmd_small(args):
    field = _field(args)
    d = _exponent(args.d)
    if args.c is not None:
        _code(field, args.c, "c", True)

    def run():
        out = []
        for s in small_bound_table(field, d):
            if args.c is not None and s.instance.rhs.value != args.c:
                continue
            payload = {
                "rhs": s.instance.rhs.value, "count": s.count, "delta": s.delta,
                "bound": s.bound, "bound_slack": s.bound_slack,
            }
            out.append(_record(field, d, 1, 1, "small-bound", "pass" if s.within_bound else "fail", payload))
        return out

    return run


def _cmd_weil(args):
    field = _field(args)
    P = _poly(field, args.poly)
    if args.d is not None and args.d != P.degree:
        raise UsageError(f"--d {args.d} disagrees with the degree of --poly ({P.degree})")
    if P.is_zero():
        raise UsageError("--poly must be nonzero")
    d = int(P.degree)
    if args.all_characters:
        labels = list(range(1, field.q))
    else:
        label = 1 if args.label is None else args.label
        _code(field, label, "label", True)
        labels = [label]

    def run():
        sums = harmonic.weil_sums_all(P)
        mods = np.abs(sums[labels])
        bound = (d - 1) * math.sqrt(field.q)
        applies = harmonic.weil_bound_applies(P)
        worst = int(labels[int(np.argmax(mods))])
        m = float(mods.max())
        ok = (not applies) or m <= bound + survey.WEIL_TOLERANCE
        payload = {
            "poly": list(P.coeffs), "characters": len(labels), "worst_label": worst,
            "max_modulus": m, "bound": bound, "min_slack": bound - m, "bound_applies": applies,
        }
        return [_record(field, d, None, None, "weil", "pass" if ok else "fail", payload)]

    return run


def _sets(args, field, rng):
    if (args.set_a is None) != (args.set_b is None):
        raise UsageError("--set-a and --set-b go together")
    if args.set_a is not None:
        for c in args.set_a + args.set_b:
            _code(field, c, "set-a/--set-b")
        return [(args.set_a, args.set_b)]
    return None


def _cmd_lemma(args):
    field = _field(args)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    explicit = _sets(args, field, None)
    if args.command == "lemma8":
        d = _exponent(args.d)
        if not 1 < d < field.p:
            raise UsageError(f"lemma8 needs 1 < d < char = {field.p}")
        c = _code(field, args.c, "c", True)
    else:
        if args.poly is None:
            d = _exponent(args.d)
            P = None
        else:
            P = _poly(field, args.poly)
            if P.is_zero():
                raise UsageError("--poly must be nonzero")
            d = int(P.degree)
            if args.d is not None and args.d != d:
                raise UsageError("--d disagrees with the degree of --poly")
        if math.gcd(d, field.q) != 1:
            raise UsageError(f"lemma12 needs gcd(d, q) = 1, got d = {d}")

    def run():
        rng = np.random.default_rng([args.seed, field.q, d])
        cases = explicit or [
            (survey.random_subset(field, rng).tolist(), survey.random_subset(field, rng).tolist())
            for _ in range(args.samples)
        ]
        out = []
        for A, B in cases:
            if args.command == "lemma8":
                chk = harmonic.verify_lemma8(field, A, B, c, d)
                extra = {"c": c.value}
            else:
                poly = P if P is not None else survey.random_polynomial(field, d, rng)
                chk = harmonic.verify_lemma12(field, A, B, poly)
                extra = {"poly": list(poly.coeffs)}
            payload = {
                "A": A, "B": B, "deviation": chk.deviation, "bound": chk.bound,
                "slack": chk.slack, "min_slack": chk.slack, **extra,
            }
            out.append(_record(field, d, None, None, args.command, "pass" if chk.holds else "fail", payload))
        return out

    return run


def _cmd_selftest(args):
    if args.q is not None or args.p is not None:
        fields = [_field(args)]
    else:
        qmin = 2 if args.qmin is None else args.qmin
        qmax = 128 if args.qmax is None else args.qmax
        try:
            fields = [construct_field(p, r) for p, r in survey.enumerate_prime_powers(qmin, qmax)]
        except FiniteFieldError as exc:
            raise UsageError(str(exc))
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")

    def run():
        return [fourier_selftest_record(f, args.seed, args.samples) for f in fields]

    return run


def fourier_selftest_record(field: FiniteField, seed: int, samples: int) -> dict:
    errs = harmonic.fourier_selftest(field, seed, samples)
    ok = max(errs["max_roundtrip_error"], errs["max_plancherel_rel_error"]) < FOURIER_TOLERANCE
    payload = {"samples": samples, "tolerance": FOURIER_TOLERANCE, **errs}
    return _record(field, 0, None, None, "fourier-selftest", "pass" if ok else "fail", payload)


def _cmd_exceptional(args):
    d = _exponent(args.d)
    if args.qmax < 2 or args.qmax > CEILING:
        raise UsageError(f"--qmax must be in [2, {CEILING}]")

    def run():
        out = []
        for q, status in survey.exceptional_scan(d, args.qmax, certificate=not args.no_certificate):
            pr = prime_power(q)
            rec = {
                "q": q, "p": pr[0], "r": pr[1], "d": d, "a": 1, "b": 1, "check": "coverage",
                "outcome": "exceptional" if status == "exceptional" else "pass",
                "payload": {"certified": status == "certified", "covered": status != "exceptional"},
                "wall_time_micros": None,
            }
            out.append(rec)
        return out

    return run


def _cmd_sweep(args):
    try:
        config = survey.SweepConfig(
            q_min=args.qmin, q_max=args.qmax, d_list=tuple(args.d), coefficient_mode=args.coefficients,
            checks=tuple(args.checks), seed=args.seed, output_path=args.out, sample_k=args.k,
            certificate=not args.no_certificate, weil_samples=args.weil_samples,
            lemma_samples=args.lemma_samples, timing=args.timing, workers=args.workers,
        )
    except (FiniteFieldError, ValueError) as exc:
        raise UsageError(str(exc))
    return config


COMMANDS = {
    "coverage": _cmd_coverage,
    "witness": _cmd_witness,
    "count": _cmd_count,
    "small": _cmd_small,
    "weil": _cmd_weil,
    "lemma8": _cmd_lemma,
    "lemma12": _cmd_lemma,
    "exceptional": _cmd_exceptional,
    "fourier-selftest": _cmd_selftest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "sweep":
            return _run_sweep(_cmd_sweep(args), args.format)
        run = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ffsums: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FiniteFieldError, ValueError) as exc:
        print(f"ffsums: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        records = run()
        with _sink(args.out) as fh:
            for rec in records:
                fh.write(_render(rec, args.format) + "\n")
            if args.command == "exceptional" and args.format == "human":
                found = [r["q"] for r in records if r["outcome"] == "exceptional"]
                fh.write(f"exceptional d={args.d} qmax={args.qmax}: {found}\n")
    except OSError as exc:
        print(f"ffsums: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if any(r["outcome"] == "fail" for r in records):
        print("ffsums: bound violated", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _run_sweep(config: survey.SweepConfig, fmt: str) -> int:
    try:
        result = survey.run_sweep(config)
    except BoundViolation as exc:
        print(f"ffsums: bound violated: {exc}", file=sys.stderr)
        if exc.record is not None:
            print(_render(exc.record.to_dict(), "json-lines"), file=sys.stderr)
        return EXIT_VIOLATION
    except OSError as exc:
        print(f"ffsums: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if config.output_path is None:
        for rec in result.records:
            print(_render(rec.to_dict(), fmt))
    for group in result.summary:
        print(_render_summary(group), file=sys.stderr if config.output_path is None else sys.stdout)
    return EXIT_OK


def _render_summary(group: dict) -> str:
    return " ".join(f"{k}={_human(v)}" for k, v in group.items())


if __name__ == "__main__":
    raise SystemExit(main())
