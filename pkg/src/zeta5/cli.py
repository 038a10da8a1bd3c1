"""Batch command-line front end.

Every verb writes one JSON document (or RFC-4180 CSV with ``--format csv``)
to stdout or ``--output``.  JSON documents carry ``seed``,
``precision_bits`` and a ``findings`` list.  Exit status: 0 when the run
completed, with findings or not; 1 on an internal inconsistency (engine vs
oracle, constant cross-checks); 2 on usage or capacity errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from typing import Callable

import mpmath

from . import __version__
from .approximation import AuditParameters, audit_section3
from .bounds import (
    InconsistencyError,
    critical_points,
    decimal_expansion,
    lcm_growth_scan,
    lemma33_check,
    printed_value_checks,
)
from .lemmas import check_lemma, lemma_for, oracle_suite, verify_lemmas
from .linear_forms import MAX_N, CapacityError, IntegralityViolation, integer_forms, quadrature_In
from .precision import (
    DEFAULT_PRECISION,
    constants_table,
    eval_zeta_form,
    zeta_even_via_pi,
)
from .zeta_forms import canonical, classify, closed_form

PREC_ENV = "ZETA5_PREC"


class InternalFailure(RuntimeError):
    """An internal cross-check disagreed; exit status 1."""


class Report:
    """Accumulates one command's payload, findings and CSV rows."""

    def __init__(self, command: str, args: argparse.Namespace):
        self.command = command
        self.args = args
        self.result: object = None
        self.findings: list = []
        self.header: list[str] = []
        self.rows: list[list] = []

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "seed": self.args.seed,
            "precision_bits": self.args.prec,
            "findings": self.findings,
            "result": self.result,
        }

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(self.header + ["seed"])
        for row in self.rows:
            writer.writerow([_cell(x) for x in row] + [self.args.seed])
        return buf.getvalue()


def _cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return str(x)


def _preview(x: Fraction, digits: int = 12) -> str:
    with mpmath.workprec(128):
        return mpmath.nstr(mpmath.mpf(x.numerator) / x.denominator, digits)


# ---------------------------------------------------------------------------
# argument parsing


def _default_prec() -> int:
    raw = os.environ.get(PREC_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {PREC_ENV}={raw!r} is not an integer") from None


def _vector(text: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected five comma-separated integers, got {text!r}") from None
    if len(parts) != 5 or any(x < 0 for x in parts):
        raise argparse.ArgumentTypeError(f"expected five nonnegative integers, got {text!r}")
    return parts


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=None, help=f"working precision in bits (env {PREC_ENV}, default {DEFAULT_PRECISION})")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--threads", type=_positive, default=1, help="maximum worker processes")
    common.add_argument("--n-max", type=int, default=None, help="run n = 0..N (or 1..N) instead of a single n")

    parser = argparse.ArgumentParser(prog="zeta5", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("form", parents=[common], help="closed form of I(r)")
    p.add_argument("--r", type=_vector, required=True, help="five integers, e.g. 3,1,0,0,0")
    p.add_argument("--digits", type=int, default=30)

    p = sub.add_parser("linform", parents=[common], help="integer linear form of I_n")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--mc-samples", type=int, default=0, help="add a Monte-Carlo cross-check with this many samples")

    p = sub.add_parser("audit", parents=[common], help="numeric replay of the approximation argument")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--eps", type=_rational, default=Fraction(1, 100))
    p.add_argument("--tau", type=_rational, default=None, help="default (1 + mu/2)/2")
    p.add_argument("--nu", type=_rational, default=Fraction(1, 64))
    p.add_argument("--mu", type=_rational, default=Fraction(1, 200))
    p.add_argument("--orientation", choices=("oriented", "literal"), default="oriented")

    p = sub.add_parser("bounds", parents=[common], help="bound constants and the sandwich check")

    p = sub.add_parser("scan-lcm", parents=[common], help="lcm(1..n) and prime-counting growth scan")
    p.add_argument("--max", dest="max_n", type=int, default=10**4)

    sub.add_parser("constants", parents=[common], help="certified zeta(2..5)")

    p = sub.add_parser("verify-lemmas", parents=[common], help="printed formulas vs engine vs series oracle")
    p.add_argument("--max-entry", type=int, default=6)
    p.add_argument("--terms", type=int, default=10**5, help="series-oracle terms")
    p.add_argument("--skip-oracle", action="store_true")
    return parser


def _ns(args, single_default: int, start: int) -> list[int]:
    if args.n_max is not None:
        return list(range(start, args.n_max + 1))
    n = args.n if args.n is not None else single_default
    return [n]


# ---------------------------------------------------------------------------
# commands


def cmd_form(args, rep: Report) -> None:
    r = args.r
    s = canonical(r)
    form = closed_form(s)
    value = eval_zeta_form(form, constants_table(args.prec))
    label = lemma_for(s)
    comp = list(classify(s))
    note = label if label else f"Lemma not applicable: composition [{','.join(map(str, comp))}]"
    result = {
        "r": list(r),
        "sorted_r": list(s),
        "composition": comp,
        "form": form.to_json(),
        "value": value.to_json(args.digits),
        "preview": _preview(value.estimate),
        "lemma_note": note,
        "coverage": "printed formula" if label else "engine-only",
    }
    if label:
        check = check_lemma(s)
        result["printed_matches_engine"] = check.matches
        if not check.matches:
            rep.findings.append(check.to_json())
    rep.result = result
    rep.header = ["r", "c0", "c2", "c3", "c4", "c5", "preview", "lemma_note"]
    rep.rows = [[" ".join(map(str, r)), *form.to_json().values(), result["preview"], note]]


def cmd_linform(args, rep: Report) -> None:
    ns = _ns(args, 0, 0)
    for n in ns:
        if n < 0:
            raise argparse.ArgumentTypeError("n must be >= 0")
        if n > MAX_N:
            raise CapacityError(f"n={n} exceeds the supported ceiling n <= {MAX_N}")
    forms = integer_forms(ns, workers=min(args.threads, len(ns)))
    constants = constants_table(args.prec)
    out = []
    rep.header = list(forms[0].FIELDS) + ["max_bits", "ln_abs_d_over_n", "integrality", "value"]
    for f in forms:
        scaled = eval_zeta_form(f.zeta_form(), constants)
        ln_d = None if f.n == 0 or f.d == 0 else math.log(abs(f.d)) / f.n
        entry = {
            **f.to_json(),
            "integrality": "ok",
            "max_bits": f.max_bits(),
            "ln_abs_d_over_n": ln_d,
            "value": scaled.to_json(),
        }
        if scaled.compare("<", 0).holds:
            rep.findings.append(
                {
                    "n": f.n,
                    "finding": "a zeta(2)+b zeta(3)+c zeta(4)+d zeta(5)+e is negative; "
                    "(-1)^n times it equals lcm^5 times the positive integral",
                }
            )
        if args.mc_samples:
            mc = quadrature_In(f.n, args.mc_samples, args.seed)
            target = eval_zeta_form(f.zeta_form().scale(Fraction((-1) ** f.n, f.lcm**5)), constants)
            entry["monte_carlo"] = {"samples": args.mc_samples, "estimate": mc.to_json(12), "contains_oriented": mc.contains_ball(target)}
        out.append(entry)
        rep.rows.append(f.csv_row() + [entry["max_bits"], "" if ln_d is None else ln_d, "ok", _preview(scaled.estimate, 20)])
    rep.result = out if args.n_max is not None else out[0]


def cmd_audit(args, rep: Report) -> None:
    params = AuditParameters(args.eps, args.mu, args.nu, args.tau, args.prec, args.orientation)
    ns = _ns(args, 0, 0)
    for n in ns:
        if n > MAX_N:
            raise CapacityError(f"n={n} exceeds the supported ceiling n <= {MAX_N}")
    if len(ns) > 1 and args.threads > 1:
        from .approximation import audit_many

        traces = [json.loads(t) for t in audit_many(ns, params, workers=args.threads)]
    else:
        traces = [audit_section3(n, params).to_json() for n in ns]
    rep.header = ["n", "step", "relation", "verdict", "lhs", "lhs_radius", "rhs", "rhs_radius"]
    for t in traces:
        failed = [d["name"] for d in t["decisions"] if d["verdict"] == "fails"]
        undecided = [d["name"] for d in t["decisions"] if d["verdict"] == "undecidable"]
        if failed:
            rep.findings.append({"n": t["n"], "final": t["final"], "failed_steps": failed})
        if undecided:
            t["notes"].append(f"{len(undecided)} steps undecidable at {args.prec} bits; retry with a larger --prec")
        for d in t["decisions"]:
            rep.rows.append([t["n"], d["name"], d["relation"], d["verdict"], *d["lhs"], *d["rhs"]])
    rep.result = traces if args.n_max is not None else traces[0]


def cmd_bounds(args, rep: Report) -> None:
    try:
        bc = critical_points(args.prec)
    except InconsistencyError as exc:
        raise InternalFailure(str(exc)) from exc
    checks = printed_value_checks(bc)
    top = args.n_max if args.n_max is not None else 10
    if top > MAX_N:
        raise CapacityError(f"n={top} exceeds the supported ceiling n <= {MAX_N}")
    constants = constants_table(args.prec)
    forms = integer_forms(range(1, top + 1), workers=args.threads)
    rows = []
    for f in forms:
        for orientation in ("literal", "oriented"):
            row = lemma33_check(f.n, constants, f, orientation)
            rows.append(row.to_json())
            if orientation == "literal" and not row.holds:
                rep.findings.append(
                    {
                        "n": f.n,
                        "finding": "eps_n <= beta_n <= delta^n zeta(5) fails for the form as built",
                        "lower": row.lower.verdict.value,
                        "upper": row.upper.verdict.value,
                    }
                )
    for c in checks:
        if not c["pass"]:
            rep.findings.append({"finding": "printed value not reproduced", **c})
    rep.result = {
        "constants": bc.to_json(),
        "delta_expansion_60": decimal_expansion(bc.delta, 60),
        "printed_value_checks": checks,
        "sandwich": rows,
    }
    rep.header = ["check", "pass"]
    rep.rows = [[c["check"], c["pass"]] for c in checks]


def cmd_scan_lcm(args, rep: Report) -> None:
    report = lcm_growth_scan(args.max_n)
    rep.result = {**report.to_json(), "rows": [list(r) for r in report.rows]}
    rep.findings.extend(report.findings())
    if not report.lcm_below_3n_all:
        rep.findings.append(f"lcm(1..n) >= 3^n first at n = {report.first_lcm_violation}")
    rep.header = list(report.CSV_COLUMNS)
    rep.rows = [list(r) for r in report.rows]


def cmd_constants(args, rep: Report) -> None:
    table = constants_table(args.prec)
    cross = {}
    for k, s in ((1, 2), (2, 4)):
        alt = zeta_even_via_pi(k, args.prec)
        ok = alt.overlaps(table.zeta(s))
        cross[f"zeta{s}"] = {"via_pi": alt.to_json(40), "overlaps": ok}
        if not ok:
            raise InternalFailure(f"zeta({s}) disagrees with its pi formula")
    rep.result = {"table": table.to_json(), "even_cross_check": cross}
    rep.header = ["s", "estimate", "radius"]
    rep.rows = [[s, *table.zeta(s).to_json(40)] for s in (2, 3, 4, 5)]


def cmd_verify_lemmas(args, rep: Report) -> None:
    checks = verify_lemmas(args.max_entry)
    summary: dict[str, dict] = {}
    for c in checks:
        entry = summary.setdefault(c.lemma, {"cases": 0, "matches": 0, "suspect_terms": set()})
        entry["cases"] += 1
        entry["matches"] += c.matches
        entry["suspect_terms"].update(c.suspect_terms)
        if not c.matches:
            rep.findings.append(c.to_json())
    for entry in summary.values():
        entry["suspect_terms"] = sorted(entry["suspect_terms"])
    result = {"lemmas": dict(sorted(summary.items()))}
    rep.header = ["r", "lemma", "matches", "suspect_terms"]
    rep.rows = [[" ".join(map(str, c.r)), c.lemma, c.matches, " ".join(map(str, c.suspect_terms))] for c in checks]
    if not args.skip_oracle:
        oracle = oracle_suite(args.max_entry, args.terms, args.prec, args.threads)
        bad = [o for o in oracle if not o.agrees]
        worst = max(max(o.engine.radius, o.oracle.radius) for o in oracle)
        result["oracle"] = {
            "vectors": len(oracle),
            "terms": args.terms,
            "agree": len(oracle) - len(bad),
            "max_radius": f"{float(worst):.3e}",
            "disagreements": [o.to_json() for o in bad],
        }
        rep.result = result
        if bad:
            raise InternalFailure(f"{len(bad)} closed forms disagree with the series oracle")
    rep.result = result


COMMANDS: dict[str, Callable[[argparse.Namespace, Report], None]] = {
    "form": cmd_form,
    "linform": cmd_linform,
    "audit": cmd_audit,
    "bounds": cmd_bounds,
    "scan-lcm": cmd_scan_lcm,
    "constants": cmd_constants,
    "verify-lemmas": cmd_verify_lemmas,
}


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.prec is None:
        args.prec = _default_prec()
    if args.prec < 64:
        parser.error("--prec must be >= 64")
    rep = Report(args.command, args)
    try:
        COMMANDS[args.command](args, rep)
    except (CapacityError, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InternalFailure, IntegralityViolation) as exc:
        print(f"internal failure: {exc}", file=sys.stderr)
        rep.findings.append({"internal_failure": str(exc)})
        _emit(rep.render(args.format), args.output)
        return 1
    _emit(rep.render(args.format), args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
