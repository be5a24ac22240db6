"""Command line front end.

Subcommands ``bounds``, ``estimate``, ``sweep``, ``reproduce`` and
``oracle-check``. Exit codes: 0 success, 1 usage error, 2 inconclusive
estimate, 3 failed check or reproduction. A JSON file given with
``--config`` supplies defaults under the same keys as the long flags
(dashes or underscores); flags given on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional, Sequence

from .checks import oracle_agreement
from .errors import HypothesisViolation, ResolventLabError, SpecParseError, UnknownScenario
from .opnorm import enclosure
from .powerset import RadiusSchedule, estimate_kx, sweep_family
from .scenarios import CSV_HEADER, SCENARIOS, run_scenario
from .shift_core import parse_shift
from .vectors import parse_vector

EXIT_OK, EXIT_USAGE, EXIT_INCONCLUSIVE, EXIT_FAILURE = 0, 1, 2, 3

THREADS_ENV = "RESOLVENT_LAB_THREADS"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _floats(text: str) -> list:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _add_common(sp: argparse.ArgumentParser, schedule: bool = True):
    sp.add_argument("--config", help="JSON file with default values for these flags")
    sp.add_argument("--format", choices=("table", "json", "csv"), default="table")
    sp.add_argument("--output", "-o", help="write to this file instead of standard output")
    sp.add_argument("--tol", type=float, default=1e-12, help="relative truncation tolerance")
    if schedule:
        sp.add_argument("--r-start", type=float, default=0.1)
        sp.add_argument("--ratio", type=float, default=0.5)
        sp.add_argument("--count", type=int, default=8)
        sp.add_argument("--threads", type=int, default=None,
                        help=f"worker threads over radii (default from {THREADS_ENV}, else 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="resolvent-lab", description="Resolvent growth exponents of weighted shifts.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    b = sub.add_parser("bounds", help="per-radius operator norm enclosure")
    b.add_argument("--shift", required=True, help="e.g. backward:harmonic:c=1")
    b.add_argument("--p", type=float, default=2.0)
    b.add_argument("--z", type=_floats, help="explicit radii, comma separated (overrides the schedule)")
    b.add_argument("--probe", action="append", help="probe vector spec (repeatable)")
    _add_common(b)

    e = sub.add_parser("estimate", help="exponent estimate for one vector")
    e.add_argument("--shift", required=True)
    e.add_argument("--vector", required=True, help="e.g. xr:r=0.5,m=5")
    e.add_argument("--p", type=float, default=2.0)
    e.add_argument("--model", choices=("inverse_log", "r_log_r", "dual"), default="dual")
    _add_common(e)

    s = sub.add_parser("sweep", help="family sweep over r")
    s.add_argument("--shift", required=True)
    s.add_argument("--family", required=True, help="xr, stack-xr, or a template containing {r}")
    s.add_argument("--r", type=_floats, required=True, help="comma separated r values")
    s.add_argument("--m", type=int, default=5)
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--model", choices=("inverse_log", "r_log_r", "dual"), default="dual")
    _add_common(s)

    r = sub.add_parser("reproduce", help="run a named scenario")
    r.add_argument("scenario", help=", ".join(SCENARIOS))
    r.add_argument("--p", type=float)
    r.add_argument("--weights")
    r.add_argument("--m", type=int)
    r.add_argument("--tail-m", type=int)
    r.add_argument("--tolerance", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--model", choices=("inverse_log", "r_log_r", "dual"))
    _add_common(r)

    o = sub.add_parser("oracle-check", help="series against dense substitution on random cases")
    o.add_argument("--cases", type=int, default=20)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--rtol", type=float, default=1e-8)
    _add_common(o, schedule=False)
    return ap


def _config_path(argv: Sequence[str]) -> Optional[str]:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _parse(argv: Sequence[str]) -> argparse.Namespace:
    ap = build_parser()
    path = _config_path(argv)
    command = next((tok for tok in argv if tok in _COMMANDS), None)
    if path and command:
        try:
            with open(path) as fh:
                conf = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise _UsageError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(conf, dict):
            raise _UsageError("config must be a JSON object")
        sp = ap._subparsers._group_actions[0].choices[command]
        conf = {k.replace("-", "_"): v for k, v in conf.items()}
        unknown = set(conf) - {a.dest for a in sp._actions}
        if unknown:
            raise _UsageError(f"unknown config keys: {sorted(unknown)}")
        for action in sp._actions:
            if action.dest in conf:
                v = conf[action.dest]
                if action.type is _floats and isinstance(v, list):
                    v = [float(u) for u in v]
                action.required = False
                action.default = v
    args = ap.parse_args(argv)
    if args.command is None:
        raise _UsageError("a subcommand is required")
    return args


def _threads(args) -> Optional[int]:
    n = getattr(args, "threads", None)
    if n is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                n = int(env)
            except ValueError:
                raise _UsageError(f"{THREADS_ENV} must be an integer") from None
    return n if n and n > 1 else None


def _schedule(args) -> RadiusSchedule:
    try:
        return RadiusSchedule(args.r_start, args.ratio, args.count)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v


def _estimate_rows(label: str, est) -> list:
    return [(label, est.vector, s.r, s.ln_num, s.ln_den_lo, s.ln_den_hi, s.ratio_lo, s.ratio_hi)
            for s in est.samples]


def _estimate_table(est) -> str:
    lines = [f"{est.shift}  x = {est.vector}  p = {est.p:g}",
             f"{'r':>12s} {'ln_num':>14s} {'ln_den_lo':>14s} {'ln_den_hi':>14s} {'ratio_lo':>10s} {'ratio_hi':>10s}"]
    for s in est.samples:
        lines.append(f"{s.r:12.6g} {s.ln_num:14.6f} {s.ln_den_lo:14.6f} {s.ln_den_hi:14.6f} "
                     f"{s.ratio_lo:10.6f} {s.ratio_hi:10.6f}")
    lines.append(f"running sup {est.running_sup:.6f}; extrapolated {est.extrapolated:.6f} "
                 f"({est.model}, residual {est.residual:.2e}); {est.status}")
    return "\n".join(lines)


def _cmd_bounds(args):
    t = parse_shift(args.shift, args.p)
    radii = args.z if args.z else list(_schedule(args).radii())
    probes = [parse_vector(v) for v in args.probe] if args.probe else None
    rows = []
    for z in radii:
        enc = enclosure(t, float(z), args.p, probes, args.tol)
        rows.append({"r": float(z), "ln_lower": enc.lower.ln_value, "ln_upper": enc.upper.ln_value,
                     "probe": enc.probe_achieving_lower, "tightness": enc.tightness})
    if args.format == "json":
        text = json.dumps({"shift": t.spec(), "p": args.p, "rows": rows}, indent=2)
    elif args.format == "csv":
        text = _csv(("bounds", r["probe"], r["r"], None, r["ln_lower"], r["ln_upper"], None, None) for r in rows)
    else:
        lines = [f"{t.spec()}  p = {args.p:g}",
                 f"{'r':>12s} {'ln_lower':>14s} {'ln_upper':>14s} {'lower/upper':>12s}  probe"]
        lines += [f"{r['r']:12.6g} {r['ln_lower']:14.6f} {r['ln_upper']:14.6f} {r['tightness']:12.6f}  {r['probe']}"
                  for r in rows]
        text = "\n".join(lines)
    return text, EXIT_OK


def _cmd_estimate(args):
    t = parse_shift(args.shift, args.p)
    est = estimate_kx(t, parse_vector(args.vector), args.p, _schedule(args), args.model,
                      tol=args.tol, max_workers=_threads(args))
    if args.format == "json":
        text = json.dumps(est.to_dict(), indent=2, default=str)
    elif args.format == "csv":
        text = _csv(_estimate_rows("estimate", est))
    else:
        text = _estimate_table(est)
    return text, EXIT_OK if est.converged else EXIT_INCONCLUSIVE


def _cmd_sweep(args):
    t = parse_shift(args.shift, args.p)
    rows, monotone = sweep_family(t, args.family, args.r, args.p, _schedule(args), args.m, args.model,
                                  tol=args.tol, max_workers=_threads(args))
    if args.format == "json":
        text = json.dumps({"shift": t.spec(), "family": args.family, "monotone": monotone,
                           "rows": [{"r": row.r, "estimate": row.estimate.to_dict()} for row in rows]},
                          indent=2, default=str)
    elif args.format == "csv":
        text = _csv([line for row in rows for line in _estimate_rows("sweep", row.estimate)])
    else:
        lines = [f"{t.spec()}  family {args.family}  p = {args.p:g}",
                 f"{'r':>8s} {'extrapolated':>13s} {'running_sup':>12s} {'residual':>10s}  status"]
        lines += [f"{row.r:8.4g} {row.estimate.extrapolated:13.6f} {row.estimate.running_sup:12.6f} "
                  f"{row.estimate.residual:10.2e}  {row.estimate.status}" for row in rows]
        lines.append(f"nondecreasing in r: {monotone}")
        text = "\n".join(lines)
    ok = all(row.estimate.converged for row in rows)
    return text, EXIT_OK if ok else EXIT_INCONCLUSIVE


def _cmd_reproduce(args):
    overrides = {k: v for k, v in (("p", args.p), ("weights", args.weights), ("m", args.m),
                                    ("tail_m", args.tail_m), ("tolerance", args.tolerance),
                                    ("seed", args.seed), ("model", args.model)) if v is not None}
    if (args.r_start, args.ratio, args.count) != (0.1, 0.5, 8):
        overrides.update(r_start=args.r_start, ratio=args.ratio, count=args.count)
    rep = run_scenario(args.scenario, overrides, max_workers=_threads(args))
    if args.format == "json":
        text = rep.to_json()
    elif args.format == "csv":
        text = _csv(rep.csv_rows())
    else:
        text = rep.to_table()
    if rep.passed:
        return text, EXIT_OK
    off_target = any(abs(r.estimated - r.expected_value) > r.tolerance or not all(r.checks.values())
                     for r in rep.rows if math.isfinite(r.estimated))
    return text, EXIT_FAILURE if off_target else EXIT_INCONCLUSIVE


def _cmd_oracle(args):
    cases = oracle_agreement(n=args.cases, seed=args.seed, rtol=args.rtol)
    ok = all(c.passed for c in cases)
    if args.format == "json":
        text = json.dumps({"rtol": args.rtol, "passed": ok,
                           "cases": [{"shift": c.shift, "vector": c.vector, "z": c.z, "compared": c.compared,
                                      "max_rel_diff": c.max_rel_diff, "passed": c.passed} for c in cases]},
                          indent=2)
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("shift", "vector", "z", "compared", "max_rel_diff", "passed"))
        for c in cases:
            w.writerow((c.shift, c.vector, repr(c.z), c.compared, repr(c.max_rel_diff), c.passed))
        text = buf.getvalue()
    else:
        lines = [f"{'shift':44s} {'vector':40s} {'z':>7s} {'n':>4s} {'max rel diff':>13s}"]
        lines += [f"{c.shift:44s} {c.vector[:40]:40s} {c.z:7.4f} {c.compared:4d} {c.max_rel_diff:13.3e}"
                  f"{'' if c.passed else '  FAIL'}" for c in cases]
        lines.append(f"{sum(c.passed for c in cases)}/{len(cases)} cases within rtol {args.rtol:g}")
        text = "\n".join(lines)
    return text, EXIT_OK if ok else EXIT_FAILURE


_COMMANDS = {"bounds": _cmd_bounds, "estimate": _cmd_estimate, "sweep": _cmd_sweep,
             "reproduce": _cmd_reproduce, "oracle-check": _cmd_oracle}


def _report_error(code: str, message: str):
    print(json.dumps({"error": code, "message": message}), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        text, code = _COMMANDS[args.command](args)
    except _UsageError as exc:
        _report_error("usage", str(exc))
        return EXIT_USAGE
    except (SpecParseError, UnknownScenario, HypothesisViolation) as exc:
        _report_error(exc.code, str(exc))
        return EXIT_USAGE
    except ResolventLabError as exc:
        _report_error(exc.code, str(exc))
        return EXIT_FAILURE
    except ValueError as exc:
        _report_error("usage", str(exc))
        return EXIT_USAGE
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
