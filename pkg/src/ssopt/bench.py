"""Benchmark harness: runs method/size grids and emits report tables.

A :class:`BenchPlan` names one of the built-in tables (t1..t6, t8, t9, t10),
each pairing a test problem with the method and size grid of the published
reference layout. :func:`run_table` executes every cell under the shared
stopping rule and returns a :class:`Report`; :func:`emit_report` serializes
it as CSV, Markdown or JSON.

CSV/JSON schema (stable): table, method, n, iterations, final_gnorm,
cpu_seconds, status, seed. Markdown mirrors the reference layout (sizes as
rows and methods as columns for t1..t6; method rows with residual and
timing columns for t8/t9/t10, plus an order-of-convergence column for t10).
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .diagnostics import acoc_of_run
from .problems import make_example
from .solver import METHODS, SolverConfig, solve

#: methods that appear in the reference tables but are defined only in
#: external references; plans naming them are rejected.
EXTERNAL_METHODS = ("na", "abb", "abbmin1", "odh1")

_TABLES = {
    "t1": dict(problem="ex1", sizes=(1000, 2000, 5000, 10000, 50000, 100000),
               methods=("ss1", "ss2", "ss3", "bb"), layout="grid",
               omitted="NA column omitted: the method is defined only in external references."),
    "t2": dict(problem="ex2", sizes=(1000, 2000, 5000, 10000, 20000, 50000),
               methods=("ss1", "ss2", "ss3", "bb"), layout="grid",
               omitted="NA column omitted: the method is defined only in external references."),
    "t3": dict(problem="ex3", sizes=(1000, 2000, 5000, 10000, 20000, 50000),
               methods=("ss1", "ss2", "ss3", "bb"), layout="grid",
               omitted="NA column omitted: the method is defined only in external references."),
    "t4": dict(problem="ex4", sizes=(1000, 2000, 5000, 10000),
               methods=("ss1", "ss2", "ss3", "bb"), layout="grid",
               omitted="NA column omitted: the method is defined only in external references.",
               unreferenced=("ss3",)),
    "t5": dict(problem="ex5", sizes=(1000, 2000, 5000, 10000, 20000, 50000),
               methods=("ss1", "ss2", "ss3", "bb"), layout="grid",
               omitted="NA column omitted: the method is defined only in external references.",
               unreferenced=("ss3",)),
    "t6": dict(problem="ex6", sizes=(1000, 2000, 5000, 10000, 20000, 50000),
               methods=("ss1", "ss2", "ss3", "bb"), layout="grid",
               omitted="NA column omitted: the method is defined only in external references."),
    "t8": dict(problem="ex8", sizes=(100,),
               methods=("ss1", "ss2", "ss3", "bb"), layout="rows",
               omitted="NA row omitted: the method is defined only in external references."),
    "t9": dict(problem="ex9", sizes=(500, 1000, 1500, 2000),
               methods=("ss1", "ss2", "ss3", "bb", "cg"), layout="rows",
               omitted="ABB/ABBmin1/ODH1 rows omitted: the methods are defined only in external references.",
               max_iter=50000, seeded=True),
    # t10 runs at n=100: the order estimate needs the final step clear of the
    # double-precision floor, and for this separable problem the order is
    # size-independent (residuals only scale with sqrt(n)).
    "t10": dict(problem="ex1", sizes=(100,),
                methods=("ss1", "ss2", "ss3"), layout="acoc", acoc=True,
                omitted=None),
}

TABLE_IDS = tuple(_TABLES)

_METHOD_LABEL = {"ss1": "SS1", "ss2": "SS2", "ss3": "SS3", "ss2s": "SS2s",
                 "ss3s": "SS3s", "bb": "BB", "cg": "CG"}

CSV_FIELDS = ("table", "method", "n", "iterations", "final_gnorm",
              "cpu_seconds", "status", "seed")


@dataclass(frozen=True)
class BenchPlan:
    """One benchmark run: a table id plus optional grid overrides."""

    table_id: str
    methods: Optional[Sequence[str]] = None
    sizes: Optional[Sequence[int]] = None
    seed: int = 20240
    format: str = "csv"

    def __post_init__(self):
        if self.table_id not in _TABLES:
            raise ValueError(f"unknown table {self.table_id!r}; known: {', '.join(TABLE_IDS)}")
        if self.format not in ("csv", "md", "json"):
            raise ValueError("format must be csv, md or json")
        if self.methods is not None:
            external = [m for m in self.methods if m.lower() in EXTERNAL_METHODS]
            if external:
                raise ValueError(
                    f"methods not implemented: {', '.join(sorted(set(external)))} "
                    "(defined only in external references, out of scope)"
                )
            unknown = [m for m in self.methods if m not in METHODS]
            if unknown:
                raise ValueError(f"unknown methods: {', '.join(sorted(set(unknown)))}")

    @property
    def table(self) -> dict:
        return _TABLES[self.table_id]

    def resolved_methods(self) -> tuple:
        return tuple(self.methods) if self.methods is not None else self.table["methods"]

    def resolved_sizes(self) -> tuple:
        return tuple(self.sizes) if self.sizes is not None else tuple(self.table["sizes"])


@dataclass
class CellResult:
    """Outcome of one (n, method) cell."""

    table: str
    method: str
    n: int
    iterations: int
    final_gnorm: float
    cpu_seconds: float
    status: str
    seed: Optional[int] = None
    acoc: Optional[float] = None
    unreferenced: bool = False


@dataclass
class Report:
    plan: BenchPlan
    cells: list = field(default_factory=list)
    footnotes: list = field(default_factory=list)

    def cell(self, n: int, method: str) -> CellResult:
        for c in self.cells:
            if c.n == n and c.method == method:
                return c
        raise KeyError((n, method))


def run_table(plan: BenchPlan) -> Report:
    """Execute every cell of a plan; failures are recorded in-cell.

    All cells run with tol 1e-6 and a 2000-iteration cap (t9 raises the
    cap to 50000 so the slow reference methods can run to convergence;
    t10 runs in ACOC mode). Cell order is row-major: sizes, then methods.
    """
    spec = plan.table
    report = Report(plan)
    if spec.get("omitted"):
        report.footnotes.append(spec["omitted"])
    if spec.get("unreferenced"):
        labels = ", ".join(_METHOD_LABEL[m] for m in spec["unreferenced"])
        report.footnotes.append(f"* no published reference value ({labels} cells).")
    max_iter = spec.get("max_iter", 2000)
    acoc_mode = bool(spec.get("acoc", False))
    seeded = bool(spec.get("seeded", False))
    for n in plan.resolved_sizes():
        try:
            problem = make_example(spec["problem"], n,
                                   seed=plan.seed if seeded else None)
        except ValueError as exc:
            for method in plan.resolved_methods():
                report.cells.append(CellResult(plan.table_id, method, n, 0,
                                               float("nan"), 0.0, f"error: {exc}",
                                               plan.seed if seeded else None))
            continue
        for method in plan.resolved_methods():
            cfg = SolverConfig(method=method, tol=1e-6, max_iter=max_iter,
                               acoc_mode=acoc_mode)
            try:
                res = solve(problem, cfg)
            except ValueError as exc:
                report.cells.append(CellResult(plan.table_id, method, n, 0,
                                               float("nan"), 0.0, f"error: {exc}",
                                               plan.seed if seeded else None))
                continue
            rho = acoc_of_run(res).rho_final if acoc_mode else None
            report.cells.append(CellResult(
                plan.table_id, method, n, res.iterations, res.final_gnorm,
                res.elapsed, res.status, plan.seed if seeded else None, rho,
                unreferenced=method in spec.get("unreferenced", ()),
            ))
    return report


# -- serialization ------------------------------------------------------------

def emit_report(report: Report, format: Optional[str] = None) -> bytes:
    """Serialize a report as CSV, Markdown or JSON bytes."""
    fmt = format or report.plan.format
    if fmt == "csv":
        return _emit_csv(report)
    if fmt == "json":
        return _emit_json(report)
    if fmt == "md":
        return _emit_md(report)
    raise ValueError(f"unknown format {fmt!r}")


def _emit_csv(report: Report) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for c in report.cells:
        writer.writerow([
            c.table, c.method, c.n, c.iterations,
            format(c.final_gnorm, ".6e"), format(c.cpu_seconds, ".3f"),
            c.status, "" if c.seed is None else c.seed,
        ])
    return buf.getvalue().encode()


def _emit_json(report: Report) -> bytes:
    rows = []
    for c in report.cells:
        rows.append({
            "table": c.table,
            "method": c.method,
            "n": c.n,
            "iterations": c.iterations,
            "final_gnorm": c.final_gnorm,
            "cpu_seconds": round(c.cpu_seconds, 3),
            "status": c.status,
            "seed": c.seed,
        })
    return (json.dumps(rows, indent=2) + "\n").encode()


def _cell_text(c: CellResult) -> str:
    text = str(c.iterations) if c.status == "converged" else c.status
    return text + ("*" if c.unreferenced else "")


def _emit_md(report: Report) -> bytes:
    plan = report.plan
    layout = plan.table["layout"]
    methods = plan.resolved_methods()
    sizes = plan.resolved_sizes()
    lines = []
    if layout == "grid":
        labels = [_METHOD_LABEL[m] for m in methods]
        lines.append("| n | " + " | ".join(labels) + " |")
        lines.append("|---" * (len(methods) + 1) + "|")
        for n in sizes:
            cells = [_cell_text(report.cell(n, m)) for m in methods]
            lines.append(f"| {n} | " + " | ".join(cells) + " |")
    elif layout == "rows":
        single = len(sizes) == 1
        head = ["method"] if single else ["method", "n"]
        lines.append("| " + " | ".join(head + ["k", "final_gnorm", "cpu_seconds"]) + " |")
        lines.append("|---" * (len(head) + 3) + "|")
        for n in sizes:
            for m in methods:
                c = report.cell(n, m)
                row = [_METHOD_LABEL[m]] if single else [_METHOD_LABEL[m], str(n)]
                row += [_cell_text(c), format(c.final_gnorm, ".4e"),
                        format(c.cpu_seconds, ".3f")]
                lines.append("| " + " | ".join(row) + " |")
    else:  # acoc layout
        lines.append("| method | k | final_gnorm | acoc |")
        lines.append("|---|---|---|---|")
        for n in sizes:
            for m in methods:
                c = report.cell(n, m)
                rho = "undefined" if c.acoc is None else format(c.acoc, ".2f")
                lines.append(f"| {_METHOD_LABEL[m]} | {_cell_text(c)} | "
                             f"{format(c.final_gnorm, '.4e')} | {rho} |")
    for note in report.footnotes:
        lines.append("")
        lines.append(note)
    return ("\n".join(lines) + "\n").encode()
