"""Command-line front end.

Subcommands::

    ssopt solve     --problem ex1 --n 1000 --method ss2 [--trace out.csv]
    ssopt bench     --table t8 --format csv --out t8.csv
    ssopt acoc      --problem ex1 --n 100 --method ss3
    ssopt gradcheck --problem ex3 --n 50 --h 1e-6

A config file (``--config``) holds ``key = value`` lines whose keys match
the long flag names (``method = ss3``, ``max-iter = 500``); explicit flags
always override config values. Exit codes: 0 success/converged, 1 usage or
input error, 2 run did not converge (breakdown, divergence or iteration
cap).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from .bench import BenchPlan, emit_report, run_table
from .diagnostics import acoc_of_run, summarize
from .problems import PROBLEM_IDS, finite_diff_gradient, make_example
from .solver import METHODS, STEP_RULES, SolverConfig, solve


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1 (argparse defaults to 2, which is reserved for
    # non-converged runs here)
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


_SCHEMA = {
    "problem": str,
    "n": int,
    "method": str,
    "step_rule": str,
    "tol": float,
    "max_iter": int,
    "seed": int,
    "trace": str,
    "table": str,
    "format": str,
    "out": str,
    "h": float,
    "acoc": bool,
}

_DEFAULTS = {
    "n": 1000,
    "method": "ss1",
    "step_rule": "primal",
    "tol": 1e-6,
    "max_iter": 2000,
    "seed": 20240,
    "format": "csv",
    "h": 1e-6,
    "acoc": False,
}


def _read_config(path: str) -> dict:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
                key, _, val = line.partition("=")
                key = key.strip().replace("-", "_")
                if key not in _SCHEMA:
                    raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
                caster = _SCHEMA[key]
                if caster is bool:
                    values[key] = val.strip().lower() in ("1", "true", "yes", "on")
                else:
                    values[key] = caster(val.strip())
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from None
    return values


def _merge(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the config file, then from the defaults."""
    config = _read_config(args.config) if getattr(args, "config", None) else {}
    for key in _SCHEMA:
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None:
            if key in config:
                setattr(args, key, config[key])
            elif key in _DEFAULTS:
                setattr(args, key, _DEFAULTS[key])
    return args


def _build_problem(args):
    seed = args.seed if args.problem == "ex9" else None
    return make_example(args.problem, args.n, seed=seed)


def _write_trace(path: str, result) -> None:
    tr = result.trace
    def fmt(v):
        return "" if (isinstance(v, float) and math.isnan(v)) else format(v, ".17g")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("k,gnorm,alpha,t,beta,gamma,seconds\n")
        for i in range(len(tr)):
            fh.write(",".join([
                str(tr.k[i]), format(tr.gnorm[i], ".17g"), fmt(tr.alpha[i]),
                fmt(tr.t[i]), fmt(tr.beta[i]), fmt(tr.gamma[i]),
                format(tr.seconds[i], ".6f"),
            ]) + "\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _cmd_solve(args) -> int:
    problem = _build_problem(args)
    cfg = SolverConfig(method=args.method, step_rule=args.step_rule, tol=args.tol,
                       max_iter=args.max_iter, acoc_mode=args.acoc)
    result = solve(problem, cfg)
    print(f"{result.status} k={result.iterations}")
    print(f"problem={problem.id} n={problem.dim} method={cfg.method} "
          f"gnorm={result.final_gnorm:.6e} time={result.elapsed:.3f}s "
          f"grad_evals={result.grad_evals}")
    if args.trace:
        _write_trace(args.trace, result)
    if args.out:
        _write_json(args.out, summarize(result))
    return 0 if result.converged else 2


def _cmd_bench(args) -> int:
    plan = BenchPlan(args.table, seed=args.seed, format=args.format)
    report = run_table(plan)
    payload = emit_report(report)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
        print(f"wrote {args.out} ({len(report.cells)} cells)")
    else:
        sys.stdout.write(payload.decode())
    return 0


def _cmd_acoc(args) -> int:
    problem = _build_problem(args)
    cfg = SolverConfig(method=args.method, step_rule=args.step_rule,
                       max_iter=args.max_iter, acoc_mode=True)
    result = solve(problem, cfg)
    report = acoc_of_run(result)
    rho = "undefined" if report.rho_final is None else f"{report.rho_final:.4f}"
    print(f"{result.status} k={result.iterations}")
    print(f"rho_final={rho} final_gnorm={result.final_gnorm:.6e} ({report.status})")
    if args.out:
        _write_json(args.out, {
            "problem": problem.id, "n": problem.dim, "method": cfg.method,
            "status": result.status, "iterations": result.iterations,
            "final_gnorm": result.final_gnorm, "rho_final": report.rho_final,
            "rho": [None if math.isnan(r) else r for r in report.rho],
        })
    return 0 if result.converged else 2


def _cmd_gradcheck(args) -> int:
    problem = _build_problem(args)
    if problem.objective is None:
        print(f"problem {problem.id} has no objective; nothing to check", file=sys.stderr)
        return 1
    rng = np.random.default_rng(args.seed)
    points = [problem.x0] + [rng.uniform(-2.0, 2.0, problem.dim) for _ in range(5)]
    worst = 0.0
    for x in points:
        ga = problem.gradient(x)
        gfd = finite_diff_gradient(problem, x, args.h)
        scale = max(float(np.max(np.abs(ga))), 1e-8)
        worst = max(worst, float(np.max(np.abs(ga - gfd)) / scale))
    ok = worst <= 1e-5
    print(f"max relative error {worst:.3e} over {len(points)} points "
          f"(h={args.h:g}) -> {'ok' if ok else 'MISMATCH'}")
    if args.out:
        _write_json(args.out, {"problem": problem.id, "n": problem.dim,
                               "h": args.h, "max_rel_error": worst, "ok": ok})
    return 0 if ok else 2


def _add_common(sp, *names):
    if "problem" in names:
        sp.add_argument("--problem", choices=PROBLEM_IDS, default=None,
                        help="test problem id")
        sp.add_argument("--n", type=int, default=None, help="problem dimension")
        sp.add_argument("--seed", type=int, default=None,
                        help="seed for problems with random data (ex9)")
    if "method" in names:
        sp.add_argument("--method", choices=METHODS, default=None, help="iteration scheme")
        sp.add_argument("--step-rule", dest="step_rule", choices=STEP_RULES,
                        default=None, help="closed-form step-size rule")
        sp.add_argument("--tol", type=float, default=None, help="gradient-norm tolerance")
        sp.add_argument("--max-iter", dest="max_iter", type=int, default=None,
                        help="iteration cap")
    sp.add_argument("--config", default=None,
                    help="key = value file; explicit flags override it")
    sp.add_argument("--out", default=None, help="write machine-readable output here")


def build_parser() -> _Parser:
    parser = _Parser(prog="ssopt",
                     description="Gradient solvers with closed-form step sizes")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", parents=[], help="run one solver on one problem")
    _add_common(sp, "problem", "method")
    sp.add_argument("--trace", default=None, help="write the per-iteration trace CSV here")
    sp.add_argument("--acoc", action="store_true", default=None,
                    help="run in convergence-order mode (tol 1e-13)")
    sp.set_defaults(func=_cmd_solve)

    sp = sub.add_parser("bench", help="reproduce one benchmark table")
    sp.add_argument("--table", required=True, help="table id (t1..t6, t8, t9, t10)")
    sp.add_argument("--format", choices=("csv", "md", "json"), default=None)
    sp.add_argument("--seed", type=int, default=None, help="seed for seeded tables (t9)")
    sp.add_argument("--config", default=None,
                    help="key = value file; explicit flags override it")
    sp.add_argument("--out", default=None, help="write the report here instead of stdout")
    sp.set_defaults(func=_cmd_bench)

    sp = sub.add_parser("acoc", help="estimate the computational order of convergence")
    _add_common(sp, "problem", "method")
    sp.set_defaults(func=_cmd_acoc)

    sp = sub.add_parser("gradcheck", help="finite-difference check of an analytic gradient")
    _add_common(sp, "problem")
    sp.add_argument("--h", type=float, default=None, help="finite-difference step")
    sp.set_defaults(func=_cmd_gradcheck)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _merge(args)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except ValueError as exc:
        print(f"ssopt: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
