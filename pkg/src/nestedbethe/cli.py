"""Command line front end: verification suites, the Bethe solver, norm checks and HC evaluation.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error,
3 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .bethe import BetheParams
from .chain import ChainConfig
from .field import QQ, ComplexField, PoleError, QParam
from .highest import HCEngine
from .onshell import norm_check, solve_bethe
from .suites import SUITES, run_suite

OK, FAILED, USAGE, INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _parse_r(text: str) -> tuple[int, ...]:
    try:
        r = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--r expects comma separated integers, got {text!r}") from None
    if any(k < 0 for k in r):
        raise UsageError("--r entries must be non-negative")
    return r


def _load_config(path, field=QQ) -> ChainConfig:
    try:
        return ChainConfig.load(path, field)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"bad config {path}: {exc}") from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_verify(args) -> int:
    cfg = _load_config(args.config) if args.config else None
    report = run_suite(args.suite, seed=args.seed, scale=args.scale, cfg=cfg,
                       bits=args.precision_bits, jobs=args.jobs)
    _emit(report.dumps(timings=args.timings), args.out)
    if args.out:
        failed = sum(not c.passed for c in report.cases)
        print(f"{args.suite}: {len(report.cases) - failed}/{len(report.cases)} cases pass")
    return OK if report.ok else FAILED


def _solve(args):
    if not args.r:
        raise UsageError(f"{args.command} needs --r")
    fld = ComplexField(args.precision_bits)
    cfg = _load_config(args.config, fld)
    r = _parse_r(args.r)
    if len(r) != cfg.m - 1:
        raise UsageError(f"--r needs {cfg.m - 1} entries for m={cfg.m}")
    t0 = time.perf_counter()
    report = solve_bethe(cfg, r, seeds=args.seeds, tol=args.tol, seed=args.seed)
    return cfg, r, report, (time.perf_counter() - t0) * 1000


def cmd_solve(args) -> int:
    cfg, r, report, ms = _solve(args)
    ser = cfg.field.serialize
    out = {
        "model_digest": cfg.digest,
        "r": list(r),
        "precision_bits": args.precision_bits,
        "solutions": [{"roots": b.to_list(), "residuals": [ser(x) for x in b.residuals]} for b in report.roots],
        "failures": report.failures,
    }
    if args.timings:
        out["runtime_ms"] = round(ms, 3)
    _emit(_dumps(out), args.out)
    return OK if report.ok else FAILED


def cmd_norm(args) -> int:
    if args.roots:
        fld = ComplexField(args.precision_bits)
        cfg = _load_config(args.config, fld)
        try:
            params = BetheParams.load(args.roots, fld)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"bad roots file {args.roots}: {exc}") from None
        candidates = [params.sets]
    else:
        cfg, _, report, _ = _solve(args)
        candidates = report.roots
    results = [norm_check(cfg, root, args.tol) for root in candidates]
    out = {"model_digest": cfg.digest, "precision_bits": args.precision_bits,
           "tolerance": args.tol, "solutions": [res.to_json() for res in results],
           "status": "pass" if results and all(res.ok for res in results) else "fail"}
    _emit(_dumps(out), args.out)
    return OK if out["status"] == "pass" else FAILED


def _parse_sets(text: str, name: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--{name} is not valid JSON: {exc}") from None
    if not isinstance(data, list) or any(not isinstance(c, list) for c in data):
        raise UsageError(f"--{name} must be a JSON list of lists")
    try:
        return tuple(tuple(QQ(str(x)) for x in c) for c in data)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--{name}: {exc}") from None


def cmd_hc_eval(args) -> int:
    if args.q is not None:
        try:
            q = QParam.of(args.q)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"--q: {exc}") from None
    elif args.config:
        q = _load_config(args.config).q
    else:
        raise UsageError("hc eval needs --q or --config")
    s, t = _parse_sets(args.s, "s"), _parse_sets(args.t, "t")
    if len(s) != len(t) or any(len(a) != len(b) for a, b in zip(s, t)):
        raise UsageError("--s and --t need the same number of colors and equal sizes per color")
    eng = HCEngine(q)
    try:
        out = {"q": QQ.serialize(q.q), "Z": QQ.serialize(eng.Z(s, t)), "Zbar": QQ.serialize(eng.Zbar(s, t))}
    except (PoleError, ZeroDivisionError) as exc:
        raise UsageError(f"parameters hit a pole: {exc}") from None
    _emit(_dumps(out), args.out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nestedbethe", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="chain config JSON (m, L, q, xi, kappa)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--precision-bits", type=int, default=256)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--timings", action="store_true", help="include runtime_ms (breaks byte determinism)")

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", required=True, choices=SUITES + ("all",))
    v.add_argument("--scale", choices=("quick", "full"), default="full")
    v.add_argument("--jobs", type=int, default=1, help="worker processes")
    v.set_defaults(func=cmd_verify)

    for name, func, helptext in (("solve-bethe", cmd_solve, "find Bethe roots"),
                                 ("norm-check", cmd_norm, "compare the Bethe norm with the Gaudin formula")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--r", help="color counts, e.g. 1,1")
        s.add_argument("--seeds", type=int, default=200, help="random Newton starts")
        s.add_argument("--tol", type=float, default=1e-25)
        if name == "norm-check":
            s.add_argument("--roots", help="JSON file {\"t\": [[...], ...]} with roots to check")
        s.set_defaults(func=func)

    hc = sub.add_parser("hc", help="highest coefficients")
    hc_sub = hc.add_subparsers(dest="hc_command", required=True)
    ev = hc_sub.add_parser("eval", parents=[common], help="evaluate Z(s|t) and its conjugate")
    ev.add_argument("--s", required=True, help='JSON list per color, e.g. [["1/2"],["3"]]')
    ev.add_argument("--t", required=True)
    ev.add_argument("--q", help="q as a rational; defaults to the config's q")
    ev.set_defaults(func=cmd_hc_eval)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    needs_config = args.command in ("solve-bethe", "norm-check")
    if needs_config and not args.config:
        print(f"error: {args.command} needs --config", file=sys.stderr)
        return USAGE
    if args.precision_bits < 128:
        print("error: --precision-bits must be at least 128", file=sys.stderr)
        return USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except Exception as exc:  # anything else is a bug or an unhandled numerical failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
