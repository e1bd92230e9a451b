"""Command-line frontend.

Subcommands wrap the library one-to-one and emit machine-readable output:
CSV (RFC-4180 quoting, manifest as leading # comments) or JSON (one
object).  Rationals are written exactly as "p/q"; stdout carries data,
stderr carries logs (including wall-clock timing, which is kept off
stdout so replaying a manifest reproduces output byte for byte).

Exit codes for `decide`: 0 below, 1 above, 2 undecided, 64 usage error,
70 runtime error.  Other subcommands: 0 on success.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import ced
from ced.catalan import (
    MODE_CAPPED,
    MODE_EXACT,
    MODE_FLATTENED,
    partial_series,
    weighted_catalan,
    weighted_catalan_sequence,
)
from ced.decision import (
    DEFAULT_M_MAX,
    BracketError,
    DecisionOutcome,
    KernelAbove,
    KernelBelow,
    OutsideWindowAbove,
    OutsideWindowError,
    Verdict,
    ZeroRhoBelow,
    classify_phase,
    critical_rho,
    decide,
    rho_c_curve,
)
from ced.params import ModelParams
from ced.simulate import (
    ResourceBudgetError,
    compare_renewals,
    max_abs_z,
    simulate_line,
    simulate_tree,
)

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)$")

EXIT_USAGE = 64
EXIT_RUNTIME = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2), which collides with Undecided
        raise UsageError(message)


def parse_rational(text: str, flag: str = "value", allow_decimal: bool = False) -> Fraction:
    """Parse an exact rational "p/q" or integer string.

    Decimal strings are rejected unless allow_decimal is set (they are
    exact when accepted: "0.1" means 1/10), because certified paths must
    not silently misrepresent inputs like 1/3.
    """
    text = text.strip()
    if _RATIONAL_RE.match(text):
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise UsageError(f"{flag}: zero denominator in {text!r}") from None
    if allow_decimal and _DECIMAL_RE.match(text):
        return Fraction(text)
    hint = " (decimals need --allow-decimal)" if _DECIMAL_RE.match(text) else ""
    raise UsageError(f"{flag}: expected an exact rational like 3/7, got {text!r}{hint}")


def _rational_arg(flag: str):
    def convert(text: str) -> Fraction:
        try:
            return parse_rational(text, flag)
        except UsageError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return convert


def fmt(q) -> str:
    return str(Fraction(q))


@dataclass
class RunManifest:
    """Echo of everything needed to replay a run byte-identically."""

    subcommand: str
    params: dict[str, str]
    seed: Optional[int] = None
    version: str = ced.__version__

    def as_dict(self) -> dict:
        return {
            "tool": "ced",
            "version": self.version,
            "subcommand": self.subcommand,
            "params": self.params,
            "seed": self.seed,
        }

    def comment_lines(self) -> list[str]:
        pieces = " ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        lines = [f"# tool=ced version={self.version} subcommand={self.subcommand}"]
        lines.append(f"# params {pieces}" if pieces else "# params")
        if self.seed is not None:
            lines.append(f"# seed {self.seed}")
        return lines


def _emit_json(manifest: RunManifest, body: dict) -> None:
    payload = {"manifest": manifest.as_dict()}
    payload.update(body)
    print(json.dumps(payload, sort_keys=True))


def _emit_csv(manifest: RunManifest, header: list[str], rows: list[list[str]]) -> None:
    for line in manifest.comment_lines():
        print(line)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _certificate_json(outcome: DecisionOutcome):
    cert = outcome.certificate
    if cert is None:
        return None
    if isinstance(cert, KernelBelow):
        return {"type": "kernel-below", "m": cert.m, "level": cert.level}
    if isinstance(cert, KernelAbove):
        return {"type": "kernel-above", "m": cert.m}
    if isinstance(cert, OutsideWindowAbove):
        return {"type": "outside-window", "side": cert.side}
    if isinstance(cert, ZeroRhoBelow):
        return {"type": "zero-rho"}
    return {"type": "unknown"}


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("CEL_THREADS", "")
    return max(1, int(env)) if env.isdigit() and int(env) > 0 else 1


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_decide(args) -> int:
    p = ModelParams(args.d, args.lam, args.rho)
    manifest = RunManifest(
        "decide",
        {"d": str(args.d), "lambda": fmt(p.lam), "rho": fmt(p.rho), "max_m": str(args.max_m)},
    )
    outcome = decide(p, args.max_m)
    if args.json:
        _emit_json(
            manifest,
            {
                "verdict": outcome.verdict.value,
                "certificate": _certificate_json(outcome),
                "m_reached": outcome.m_reached,
            },
        )
    else:
        for line in manifest.comment_lines():
            print(line)
        print(f"verdict: {outcome.verdict.value}")
        print(f"certificate: {json.dumps(_certificate_json(outcome), sort_keys=True)}")
        print(f"m_reached: {outcome.m_reached}")
    return {Verdict.BELOW: 0, Verdict.ABOVE: 1, Verdict.UNDECIDED: 2}[outcome.verdict]


def _parse_grid(text: str) -> list[Fraction]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--lambda-grid: expected LO:HI:N")
    lo = parse_rational(parts[0], "--lambda-grid")
    hi = parse_rational(parts[1], "--lambda-grid")
    try:
        n = int(parts[2])
    except ValueError:
        raise UsageError("--lambda-grid: N must be an integer") from None
    if n < 1 or hi < lo:
        raise UsageError("--lambda-grid: need N >= 1 and HI >= LO")
    if n == 1:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def _cmd_rho_c(args) -> int:
    if (args.lam is None) == (args.lambda_grid is None):
        raise UsageError("rho-c: give exactly one of --lambda or --lambda-grid")
    tol = args.tol
    if args.lam is not None:
        manifest = RunManifest(
            "rho-c",
            {
                "d": str(args.d),
                "lambda": fmt(args.lam),
                "tol": fmt(tol),
                "max_m": str(args.max_m),
            },
        )
        try:
            bracket = critical_rho(args.d, args.lam, tol, args.max_m)
        except OutsideWindowError as exc:
            raise UsageError(f"--lambda: {exc}") from None
        points = [(args.lam, bracket.lo, bracket.hi,
                   "unresolved" if bracket.unresolved_midpoint is not None else "bracket",
                   bracket)]
    else:
        grid = _parse_grid(args.lambda_grid)
        manifest = RunManifest(
            "rho-c",
            {
                "d": str(args.d),
                "lambda_grid": args.lambda_grid,
                "tol": fmt(tol),
                "max_m": str(args.max_m),
            },
        )
        curve = rho_c_curve(args.d, grid, tol, args.max_m, threads=_threads(args))
        points = [(pt.lam, pt.lo, pt.hi, pt.status, pt.bracket) for pt in curve]

    def cert_pair(bracket):
        if bracket is None:
            return None, None
        return (
            _certificate_json(bracket.lo_outcome),
            _certificate_json(bracket.hi_outcome),
        )

    if args.format == "json":
        rows = []
        for lam, lo, hi, status, bracket in points:
            row = {"lambda": fmt(lam), "lo": fmt(lo), "hi": fmt(hi), "status": status}
            if args.certs:
                lo_cert, hi_cert = cert_pair(bracket)
                row["lo_certificate"] = lo_cert
                row["hi_certificate"] = hi_cert
            rows.append(row)
        _emit_json(manifest, {"rows": rows})
    else:
        header = ["lambda", "lo", "hi", "status"]
        if args.certs:
            header += ["lo_certificate", "hi_certificate"]
        rows = []
        for lam, lo, hi, status, bracket in points:
            row = [fmt(lam), fmt(lo), fmt(hi), status]
            if args.certs:
                lo_cert, hi_cert = cert_pair(bracket)
                row += [json.dumps(lo_cert, sort_keys=True), json.dumps(hi_cert, sort_keys=True)]
            rows.append(row)
        _emit_csv(manifest, header, rows)
    return 0


def _cmd_catalan(args) -> int:
    p = ModelParams(args.d, args.lam, args.rho)
    mode = args.mode
    if mode != MODE_EXACT and args.m is None:
        raise UsageError(f"--mode {mode} needs --m")
    params = {
        "d": str(args.d),
        "lambda": fmt(p.lam),
        "rho": fmt(p.rho),
        "mode": mode,
    }
    if args.m is not None:
        params["m"] = str(args.m)
    if args.z is not None:
        # partial sum of the generating function up to k_max
        k_hi = args.k_max if args.k_max is not None else args.k
        if k_hi is None:
            raise UsageError("--z needs --k or --k-max for the truncation order")
        params.update({"z": fmt(args.z), "K": str(k_hi)})
        manifest = RunManifest("catalan", params)
        value = partial_series(p, args.z, k_hi, mode, args.m)
        if args.format == "json":
            _emit_json(manifest, {"partial_series": fmt(value)})
        else:
            for line in manifest.comment_lines():
                print(line)
            print(fmt(value))
        return 0
    if args.k_max is not None:
        params["k_max"] = str(args.k_max)
        manifest = RunManifest("catalan", params)
        seq = weighted_catalan_sequence(p, args.k_max, mode, args.m)
        if args.format == "json":
            _emit_json(manifest, {"rows": [{"k": k, "value": fmt(v)} for k, v in enumerate(seq)]})
        else:
            _emit_csv(manifest, ["k", "value"], [[str(k), fmt(v)] for k, v in enumerate(seq)])
        return 0
    if args.k is None:
        raise UsageError("catalan: give --k or --k-max")
    params["k"] = str(args.k)
    manifest = RunManifest("catalan", params)
    value = weighted_catalan(p, args.k, mode, args.m).value
    if args.format == "json":
        _emit_json(manifest, {"k": args.k, "value": fmt(value)})
    else:
        for line in manifest.comment_lines():
            print(line)
        print(fmt(value))
    return 0


def _cmd_simulate(args) -> int:
    lam = parse_rational(args.lam, "--lambda", allow_decimal=args.allow_decimal)
    rho = parse_rational(args.rho, "--rho", allow_decimal=args.allow_decimal)
    p = ModelParams(args.d, lam, rho)
    threads = _threads(args)
    if args.engine == "line":
        manifest = RunManifest(
            "simulate line",
            {
                "d": str(args.d),
                "lambda": fmt(lam),
                "rho": fmt(rho),
                "k_max": str(args.k_max),
                "trials": str(args.trials),
            },
            seed=args.seed,
        )
        summary = simulate_line(p, args.trials, args.k_max, args.seed, threads=threads)
        rows = compare_renewals(p, summary)
        if args.format == "json":
            _emit_json(
                manifest,
                {
                    "rows": [
                        {
                            "k": r.k,
                            "count": summary.renewal_counts[r.k],
                            "frequency": r.observed,
                            "stderr": r.stderr,
                            "exact": r.expected,
                            "z": r.z,
                        }
                        for r in rows
                    ],
                    "max_abs_z": max_abs_z(rows),
                    "absorption": dict(summary.absorption_counts),
                },
            )
        else:
            header = ["k", "count", "frequency", "stderr", "exact", "z"]
            table = [
                [
                    str(r.k),
                    str(summary.renewal_counts[r.k]),
                    repr(r.observed),
                    repr(r.stderr),
                    repr(r.expected),
                    "" if r.z is None else repr(r.z),
                ]
                for r in rows
            ]
            _emit_csv(manifest, header, table)
            print(f"# max_abs_z {max_abs_z(rows)!r}")
            print(f"# absorption {json.dumps(dict(summary.absorption_counts), sort_keys=True)}")
        return 0

    manifest = RunManifest(
        "simulate tree",
        {
            "d": str(args.d),
            "lambda": fmt(lam),
            "rho": fmt(rho),
            "depth": str(args.depth),
            "trials": str(args.trials),
        },
        seed=args.seed,
    )
    summary = simulate_tree(p, args.depth, args.trials, args.seed, threads=threads)
    exact = weighted_catalan_sequence(p, args.depth)
    levels = list(range(args.depth + 1))
    if args.format == "json":
        _emit_json(
            manifest,
            {
                "rows": [
                    {
                        "level": k,
                        "mean": summary.level_renewal_mean(k),
                        "stderr": summary.level_renewal_stderr(k),
                        "exact": float(args.d**k * exact[k]),
                    }
                    for k in levels
                ],
                "blue_reach_cap_frequency": summary.blue_reach_cap_frequency(),
                "red_reach_cap_frequency": summary.red_reach_cap_frequency(),
            },
        )
    else:
        header = ["level", "mean", "stderr", "exact"]
        table = [
            [
                str(k),
                repr(summary.level_renewal_mean(k)),
                repr(summary.level_renewal_stderr(k)),
                repr(float(args.d**k * exact[k])),
            ]
            for k in levels
        ]
        _emit_csv(manifest, header, table)
        print(f"# blue_reach_cap_frequency {summary.blue_reach_cap_frequency()!r}")
        print(f"# red_reach_cap_frequency {summary.red_reach_cap_frequency()!r}")
    return 0


def _cmd_phase(args) -> int:
    p = ModelParams(args.d, args.lam, args.rho)
    manifest = RunManifest(
        "phase",
        {"d": str(args.d), "lambda": fmt(p.lam), "rho": fmt(p.rho), "max_m": str(args.max_m)},
    )
    label = classify_phase(p, args.max_m)
    if args.json:
        _emit_json(manifest, {"phase": label.value})
    else:
        for line in manifest.comment_lines():
            print(line)
        print(label.value)
    return 0


# ---------------------------------------------------------------------------
# parser wiring


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ced", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    pd = sub.add_parser("decide", help="decide rho below/above the critical death rate")
    pd.add_argument("--d", type=int, required=True)
    pd.add_argument("--lambda", dest="lam", type=_rational_arg("--lambda"), required=True)
    pd.add_argument("--rho", type=_rational_arg("--rho"), required=True)
    pd.add_argument("--max-m", dest="max_m", type=int, default=DEFAULT_M_MAX)
    pd.add_argument("--json", action="store_true")
    pd.set_defaults(func=_cmd_decide)

    pr = sub.add_parser("rho-c", help="bracket the critical death rate by bisection")
    pr.add_argument("--d", type=int, required=True)
    pr.add_argument("--lambda", dest="lam", type=_rational_arg("--lambda"))
    pr.add_argument("--lambda-grid", dest="lambda_grid", help="LO:HI:N evenly spaced")
    pr.add_argument("--tol", type=_rational_arg("--tol"), required=True)
    pr.add_argument("--max-m", dest="max_m", type=int, default=DEFAULT_M_MAX)
    pr.add_argument("--certs", action="store_true", help="embed endpoint certificates")
    pr.add_argument("--format", choices=("csv", "json"), default="csv")
    pr.add_argument("--threads", type=int)
    pr.set_defaults(func=_cmd_rho_c)

    pc = sub.add_parser("catalan", help="exact weighted Catalan numbers and partial series")
    pc.add_argument("--d", type=int, default=2)
    pc.add_argument("--lambda", dest="lam", type=_rational_arg("--lambda"), required=True)
    pc.add_argument("--rho", type=_rational_arg("--rho"), required=True)
    pc.add_argument("--k", type=int)
    pc.add_argument("--k-max", dest="k_max", type=int)
    pc.add_argument("--z", type=_rational_arg("--z"), help="evaluate the partial series at z")
    pc.add_argument("--mode", choices=(MODE_EXACT, MODE_CAPPED, MODE_FLATTENED), default=MODE_EXACT)
    pc.add_argument("--m", type=int, help="cutoff height for capped/flattened modes")
    pc.add_argument("--format", choices=("csv", "json"), default="csv")
    pc.set_defaults(func=_cmd_catalan)

    ps = sub.add_parser("simulate", help="Monte Carlo engines")
    ps.add_argument("engine", choices=("line", "tree"))
    ps.add_argument("--d", type=int, default=2)
    ps.add_argument("--lambda", dest="lam", required=True)
    ps.add_argument("--rho", required=True)
    ps.add_argument("--trials", type=int, required=True)
    ps.add_argument("--seed", type=int, required=True, help="required: no silent nondeterminism")
    ps.add_argument("--k-max", dest="k_max", type=int, default=8, help="line: stop at this blue position")
    ps.add_argument("--depth", type=int, default=6, help="tree: depth cap")
    ps.add_argument("--threads", type=int)
    ps.add_argument("--allow-decimal", action="store_true",
                    help="accept decimal rates (exact: 0.1 means 1/10); simulation only")
    ps.add_argument("--format", choices=("csv", "json"), default="csv")
    ps.set_defaults(func=_cmd_simulate)

    pp = sub.add_parser("phase", help="classify coexistence / escape / extinction")
    pp.add_argument("--d", type=int, required=True)
    pp.add_argument("--lambda", dest="lam", type=_rational_arg("--lambda"), required=True)
    pp.add_argument("--rho", type=_rational_arg("--rho"), required=True)
    pp.add_argument("--max-m", dest="max_m", type=int, default=DEFAULT_M_MAX)
    pp.add_argument("--json", action="store_true")
    pp.set_defaults(func=_cmd_phase)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"ced: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    start = time.monotonic()
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"ced: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OutsideWindowError, BracketError, ResourceBudgetError, ValueError) as exc:
        print(f"ced: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"ced {args.subcommand}: {time.monotonic() - start:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
