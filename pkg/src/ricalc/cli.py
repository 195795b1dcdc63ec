"""``ricalc`` command line."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import euclid, operators, optimal
from .lzspaces import LZParams, associate_params, format_number, lz_norm
from .stepfn import StepFunction, doublestar, rearrange
from .verify import SUITE_NAMES, SuiteConfig, default_jobs, rows_to_csv, run_suite, summary


class UsageError(Exception):
    pass


def _load_json(text_or_path: str):
    p = Path(text_or_path)
    try:
        raw = p.read_text() if p.exists() else text_or_path
        return json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {text_or_path!r}: {exc}") from exc


def _load_step(path: str) -> StepFunction:
    obj = _load_json(path)
    try:
        if "offset" in obj:
            return euclid.LineStepFunction.from_json(obj).as_step()
        return StepFunction.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed function spec: {exc}") from exc


def _load_line(path: str) -> euclid.LineStepFunction:
    obj = _load_json(path)
    try:
        return euclid.LineStepFunction.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed function spec: {exc}") from exc


def _load_space(text: str) -> LZParams:
    try:
        return LZParams.from_json(_load_json(text))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed space spec: {exc}") from exc


def _pair(text: str | None):
    if text is None:
        return None
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected two comma-separated numbers, got {text!r}") from exc
    return (a, b)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# norm


_FUNCTIONALS = {
    "maximal-range": lambda f, X, g, n: (optimal.maximal_range_norm(f, X), _assoc_kind(X)),
    "maximal-domain": lambda f, X, g, n: (optimal.maximal_domain_norm(f, X), "equivalent"),
    "fractional-range": lambda f, X, g, n: (optimal.frac_range_norm_simple(f, X, g, n), _assoc_kind(X)),
    "fractional-range-sup": lambda f, X, g, n: (optimal.frac_range_norm_sup_estimate(f, X, g, n).lower, "lower-bound"),
    "hilbert-range": lambda f, X, g, n: (optimal.hilbert_range_norm(f, X), _assoc_kind(X)),
    "riesz-range": lambda f, X, g, n: (optimal.riesz_range_norm(f, X, g, n), _assoc_kind(X)),
}


def _assoc_kind(X: LZParams) -> str:
    return "exact" if associate_params(X).is_exact_norm() else "equivalent"


def cmd_norm(args) -> int:
    f = _load_step(args.function)
    if args.functional:
        if args.X is None:
            raise UsageError("--functional needs --X")
        X = _load_space(args.X)
        fn = _FUNCTIONALS[args.functional]
        if args.functional.startswith(("fractional", "riesz")) and args.gamma is None:
            raise UsageError(f"{args.functional} needs --gamma")
        value, kind = fn(f, X, args.gamma, args.dim)
        space = X
    else:
        if args.space is None:
            raise UsageError("give --space or --functional")
        space = _load_space(args.space)
        nv = lz_norm(f, space)
        value, kind = nv.value, "exact" if nv.exact_norm else "equivalent"
    if args.json:
        _emit({"value": format_number(value), "kind": kind, "space": space.to_json(), "functional": args.functional or "lz"})
    else:
        print(f"{'inf' if value == math.inf else repr(float(value))}\t{kind}")
    return 0


# ---------------------------------------------------------------------------
# optimal


def cmd_optimal(args) -> int:
    try:
        op = optimal.ClassicalOperator.parse(args.operator, args.gamma, args.dim)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    A = _pair(args.A) or (0.0, 0.0)
    B = _pair(args.B)
    try:
        X = LZParams(args.p, args.q, A, B)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = optimal.optimal_partner_lookup(op, X, args.direction)
    out = res.to_json()
    out["operator"] = op.kind
    out["input"] = X.to_json()
    out["direction"] = args.direction
    _emit(out)
    return 0


# ---------------------------------------------------------------------------
# apply


_HALF_LINE = {
    "rearrange": lambda f, a: rearrange(f),
    "doublestar": lambda f, a: doublestar(f),
    "P": lambda f, a: operators.apply_P(f),
    "Q": lambda f, a: operators.apply_Q(f),
    "S": lambda f, a: operators.apply_S(f),
    "S_alpha": lambda f, a: operators.apply_S_alpha(f, _need(a.alpha, "--alpha")),
    "T_alpha": lambda f, a: operators.apply_T_alpha(f, _need(a.alpha, "--alpha")),
    "R": lambda f, a: operators.apply_R(f, _need(a.gamma, "--gamma") / a.dim),
    "R_prime": lambda f, a: operators.apply_R_prime(f, _need(a.gamma, "--gamma") / a.dim),
}

_LINE = ("maximal", "fractional-maximal", "hilbert", "riesz")


def _need(x, flag):
    if x is None:
        raise UsageError(f"this operator needs {flag}")
    return x


def cmd_apply(args) -> int:
    if args.operator in _HALF_LINE:
        f = _load_step(args.function)
        try:
            res = _HALF_LINE[args.operator](f, args)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        _emit(res.to_json())
        return 0
    f = _load_line(args.function)
    if args.x is None:
        raise UsageError("line operators need --x (comma-separated points)")
    try:
        xs = [float(v) for v in args.x.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --x: {exc}") from exc
    if args.operator == "maximal":
        M = euclid.maximal_function(f)
        vals = [M.value_at(x) for x in xs]
    elif args.operator == "fractional-maximal":
        M = euclid.fractional_maximal_function(f, _need(args.gamma, "--gamma"))
        vals = [M.value_at(x) for x in xs]
    elif args.operator == "hilbert":
        vals = [euclid.hilbert_transform(f, x) for x in xs]
    else:
        vals = [euclid.riesz_potential(f, _need(args.gamma, "--gamma"), x) for x in xs]
    _emit({"x": xs, "values": [format_number(v) if math.isinf(v) else v for v in vals]})
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    cfg = SuiteConfig(args.suite, n=args.n, seed=args.seed, tol=args.tol, out=args.out, jobs=args.jobs or default_jobs())
    start = time.perf_counter()
    rows = run_suite(cfg)
    elapsed = time.perf_counter() - start
    summ = summary(rows, cfg.suite, cfg.seed, cfg.n)
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{cfg.suite}.csv").write_text(rows_to_csv(rows))
        (out / f"{cfg.suite}.summary.json").write_text(json.dumps(summ, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        print(f"ricalc: cannot write report: {exc}", file=sys.stderr)
        return 2
    status = "PASS" if summ["passed"] else "FAIL"
    print(f"{status} {cfg.suite}: {summ['rows']} rows, {summ['failures']} failures ({elapsed:.1f}s) -> {out}")
    return 0 if summ["passed"] else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ricalc", description="Rearrangement-invariant norm calculator.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="evaluate an LZ norm or an operator-induced functional")
    p.add_argument("function", help="function spec (path or inline JSON)")
    p.add_argument("--space", help='LZ parameters, e.g. \'{"p":2,"q":1,"A":[0,0]}\'')
    p.add_argument("--functional", choices=sorted(_FUNCTIONALS))
    p.add_argument("--X", help="space the functional is built from")
    p.add_argument("--gamma", type=float)
    p.add_argument("--dim", type=int, default=1, help="dimension n (default 1)")
    p.add_argument("--json", action="store_true", help="print a JSON object")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("optimal", help="look up the optimal range or domain partner")
    p.add_argument("operator", help="M, Mgamma, H or I")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--A", help="a0,a_inf")
    p.add_argument("--B", help="b0,b_inf")
    p.add_argument("--gamma", type=float)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--direction", choices=("range", "domain"), default="range")
    p.set_defaults(func=cmd_optimal)

    p = sub.add_parser("apply", help="apply an operator to a function spec")
    p.add_argument("operator", choices=sorted(_HALF_LINE) + list(_LINE))
    p.add_argument("function")
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--x", help="evaluation points for line operators")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITE_NAMES + ("all",))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=1000, help="random corpus size for pairwise checks")
    p.add_argument("--tol", type=float, help="override the tolerance of exact-identity checks")
    p.add_argument("--out", default="ricalc-report", help="output directory")
    p.add_argument("--jobs", type=int, help="worker processes (default $RICALC_JOBS or 1)")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ricalc: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
