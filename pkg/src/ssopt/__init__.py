"""Line-search-free gradient solvers with closed-form step sizes.

Public surface: the problem suite (:mod:`ssopt.problems`), the iteration
schemes (:mod:`ssopt.solver`), convergence-order diagnostics
(:mod:`ssopt.diagnostics`), the table benchmark harness (:mod:`ssopt.bench`)
and the ``ssopt`` command line (:mod:`ssopt.cli`).
"""
from ._backend import BACKEND, backend_name
from .problems import (
    PROBLEM_IDS,
    Problem,
    QuadraticOperator,
    finite_diff_gradient,
    gradient_rel_error,
    make_example,
    quadratic_matvec,
)
from .solver import (
    BB_VARIANTS,
    METHODS,
    STEP_RULES,
    BreakdownError,
    IterationTrace,
    NonfiniteError,
    RunResult,
    SolverConfig,
    beta_coeff,
    gamma_coeff,
    run_bb,
    run_cg_quadratic,
    run_ss1,
    run_ss2,
    run_ss2_scalar,
    run_ss3,
    run_ss3_scalar,
    solve,
    step_size_dual,
    step_size_primal,
    t_scalar,
)
from .diagnostics import AcocReport, acoc, summarize
from .bench import BenchPlan, CellResult, Report, emit_report, run_table

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "backend_name",
    "PROBLEM_IDS",
    "Problem",
    "QuadraticOperator",
    "finite_diff_gradient",
    "gradient_rel_error",
    "make_example",
    "quadratic_matvec",
    "METHODS",
    "STEP_RULES",
    "BB_VARIANTS",
    "BreakdownError",
    "NonfiniteError",
    "SolverConfig",
    "IterationTrace",
    "RunResult",
    "step_size_primal",
    "step_size_dual",
    "t_scalar",
    "beta_coeff",
    "gamma_coeff",
    "run_ss1",
    "run_ss2",
    "run_ss3",
    "run_ss2_scalar",
    "run_ss3_scalar",
    "run_bb",
    "run_cg_quadratic",
    "solve",
    "AcocReport",
    "acoc",
    "summarize",
    "BenchPlan",
    "CellResult",
    "Report",
    "run_table",
    "emit_report",
    "__version__",
]
