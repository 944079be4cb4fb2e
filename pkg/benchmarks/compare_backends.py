#!/usr/bin/env python3
"""Times the compiled kernels against the NumPy fallback.

Runs each gradient kernel over a size sweep and a few end-to-end solves,
once per backend, and prints the speedup. The backend is forced through the
SSOPT_BACKEND environment variable, so this script re-executes itself once
per backend and compares the collected timings.

Usage: python benchmarks/compare_backends.py [--sizes 1000,100000] [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

GRAD_CASES = ("ex1", "ex2", "ex3", "ex5", "ex6")
SOLVE_CASES = (
    ("ex3", "ss3", 50000, 2000),   # problem, method, n, max_iter
    ("ex8", "ss1", 100, 2000),
    ("ex9", "bb", 2000, 50000),
)


def _best_of(repeat, fn, *args):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def measure(sizes, repeat):
    from ssopt import SolverConfig, backend_name, make_example, solve

    rows = {"backend": backend_name(), "grad": {}, "solve": {}}
    rng = np.random.default_rng(0)
    for pid in GRAD_CASES:
        for n in sizes:
            p = make_example(pid, n)
            x = rng.uniform(-1.0, 1.0, n)
            p.gradient(x)  # warm up
            # kernels are fast; loop enough to get a stable reading
            loops = max(1, int(2e5 / max(n, 1)))
            def run():
                for _ in range(loops):
                    p.gradient(x)
            rows["grad"][f"{pid}/n={n}"] = _best_of(repeat, run) / loops
    for pid, method, n, max_iter in SOLVE_CASES:
        p = make_example(pid, n, seed=20240 if pid == "ex9" else None)
        cfg = SolverConfig(method=method, max_iter=max_iter)
        rows["solve"][f"{pid}/{method}/n={n}"] = _best_of(max(1, repeat // 2), solve, p, cfg)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1000,100000",
                    help="comma-separated gradient sizes")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--_collect", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    sizes = tuple(int(s) for s in args.sizes.split(","))

    if args._collect:
        json.dump(measure(sizes, args.repeat), sys.stdout)
        return

    results = {}
    for backend in ("numpy", "compiled"):
        env = dict(os.environ, SSOPT_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--_collect",
             "--sizes", args.sizes, "--repeat", str(args.repeat)],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            if backend == "compiled":
                print("compiled backend unavailable; timings below are NumPy only\n"
                      + proc.stderr.strip())
                continue
            print(proc.stderr, file=sys.stderr)
            raise SystemExit(1)
        results[backend] = json.loads(proc.stdout)

    base = results.get("numpy")
    fast = results.get("compiled")
    print(f"{'case':32s} {'numpy':>12s} {'compiled':>12s} {'speedup':>9s}")
    for section in ("grad", "solve"):
        for case, t_np in base[section].items():
            label = f"{section}:{case}"
            if fast is None:
                print(f"{label:32s} {t_np * 1e6:10.1f}us {'-':>12s} {'-':>9s}")
            else:
                t_c = fast[section][case]
                print(f"{label:32s} {t_np * 1e6:10.1f}us {t_c * 1e6:10.1f}us "
                      f"{t_np / t_c:8.2f}x")


if __name__ == "__main__":
    main()
