"""Iteration schemes with closed-form step sizes.

Methods
-------
ss1    one-step gradient iteration, x+ = x - a g(x)
ss2    two-step scheme: the ss1 sub-step plus one corrected sub-step scaled
       by the acceleration factor T
ss3    three-step scheme: ss2 plus a second corrected sub-step reusing a, T
ss2s   scalar-coefficient two-step variant (factor 1 + beta)
ss3s   scalar-coefficient three-step variant (factor 1 + beta + beta*gamma)
bb     Barzilai-Borwein secant step sizes (variants bb1/bb2)
cg     linear conjugate gradient on a quadratic operator

The step size ``a`` comes from a secant pair at x and w = x + g(x):
``primal`` minimizes the quadratic model of ||g(x - a g(x))||^2, ``dual``
is the companion formula built from the same pair (never smaller on
quadratics). No line search is used anywhere. Every scheme terminates on
small gradient norm, the iteration cap, a degenerate denominator
(``breakdown_denominator``) or non-finite values (``diverged_nonfinite``).
"""
from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .problems import Problem, QuadraticOperator

Array = np.ndarray

METHODS = ("ss1", "ss2", "ss3", "ss2s", "ss3s", "bb", "cg")
STEP_RULES = ("primal", "dual")
BB_VARIANTS = ("bb1", "bb2")

STATUS_CONVERGED = "converged"
STATUS_MAX_ITER = "max_iter_reached"
STATUS_BREAKDOWN = "breakdown_denominator"
STATUS_NONFINITE = "diverged_nonfinite"

#: relative factor of the denominator guard (absolute part is configurable)
DENOM_REL = 1e-16
#: tolerance used when a run is in convergence-order (ACOC) mode
ACOC_TOL = 1e-13

_NAN = float("nan")


class BreakdownError(ArithmeticError):
    """A step-size or coefficient denominator fell below its guard."""


class NonfiniteError(ArithmeticError):
    """A non-finite value surfaced in a step computation."""


@dataclass(frozen=True)
class SolverConfig:
    """Method choice, stopping rule and safeguards for one run."""

    method: str = "ss1"
    step_rule: str = "primal"
    tol: float = 1e-6
    max_iter: int = 2000
    denom_floor: float = 1e-30
    acoc_mode: bool = False
    bb_variant: str = "bb2"
    norm: str = "l2"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"unknown step rule {self.step_rule!r}")
        if self.bb_variant not in BB_VARIANTS:
            raise ValueError(f"unknown bb variant {self.bb_variant!r}")
        if self.norm not in ("l2", "max"):
            raise ValueError("norm must be 'l2' or 'max'")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.denom_floor < 0.0:
            raise ValueError("denom_floor must be nonnegative")

    @property
    def effective_tol(self) -> float:
        return ACOC_TOL if self.acoc_mode else self.tol


@dataclass
class IterationTrace:
    """Per-iterate records; row k belongs to iterate x_k.

    ``alpha``/``t``/``beta``/``gamma`` at row k are the scalars used to step
    from x_k (NaN where a method does not use them or no step was taken).
    ``seconds`` is elapsed wall time when the row was written.
    """

    k: list = field(default_factory=list)
    gnorm: list = field(default_factory=list)
    alpha: list = field(default_factory=list)
    t: list = field(default_factory=list)
    beta: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    seconds: list = field(default_factory=list)

    def add(self, k: int, gnorm: float, seconds: float, alpha: float = _NAN,
            t: float = _NAN, beta: float = _NAN, gamma: float = _NAN):
        self.k.append(k)
        self.gnorm.append(gnorm)
        self.alpha.append(alpha)
        self.t.append(t)
        self.beta.append(beta)
        self.gamma.append(gamma)
        self.seconds.append(seconds)

    def __len__(self) -> int:
        return len(self.k)


@dataclass
class RunResult:
    """Terminal state of one solver run plus its iteration trace."""

    status: str
    x_final: Array
    iterations: int
    trace: IterationTrace
    method: str
    problem_id: str
    n: int
    final_gnorm: float
    elapsed: float
    grad_evals: int
    tol: float

    @property
    def converged(self) -> bool:
        return self.status == STATUS_CONVERGED


# -- scalar building blocks ---------------------------------------------------

def _dot(a: Array, b: Array) -> float:
    return float(a @ b)


def _guard(value: float, scale: float, floor: float, what: str) -> float:
    if not math.isfinite(value):
        raise NonfiniteError(what)
    if abs(value) <= max(floor, DENOM_REL * scale):
        raise BreakdownError(f"denominator {what} below guard")
    return value


def step_size_primal(gx: Array, gw: Array, *, denom_floor: float = 1e-30) -> float:
    """Step size ((g(w)-g(x))^T g(x)) / ||g(w)-g(x)||^2.

    Minimizes the quadratic model of ||g(x - a g(x))||^2; positive whenever
    the gradient map is monotone. Raises BreakdownError when the secant
    difference is negligible against ||g(x)||^2.
    """
    d = gw - gx
    den = _guard(_dot(d, d), _dot(gx, gx), denom_floor, "||g(w)-g(x)||^2")
    num = _dot(d, gx)
    alpha = num / den
    if not math.isfinite(alpha):
        raise NonfiniteError("step size")
    return alpha


def step_size_dual(gx: Array, gw: Array, *, denom_floor: float = 1e-30) -> float:
    """Companion step size ||g(x)||^2 / (g(x)^T (g(w)-g(x))).

    On quadratics it is never smaller than the primal value (Cauchy-Schwarz)
    when both are defined and positive.
    """
    nx2 = _dot(gx, gx)
    den = _guard(_dot(gx, gw - gx), nx2, denom_floor, "g(x)^T (g(w)-g(x))")
    alpha = nx2 / den
    if not math.isfinite(alpha):
        raise NonfiniteError("step size")
    return alpha


def t_scalar(gx: Array, gw: Array, gy: Array, *, denom_floor: float = 1e-30) -> float:
    """Acceleration factor T = 1 + gx.gy/||gx||^2 + gw.gy/||gw||^2.

    Equals exactly 1 when g(y) = 0. May be negative far from the solution.
    """
    nx2 = _guard(_dot(gx, gx), 0.0, denom_floor, "||g(x)||^2")
    nw2 = _guard(_dot(gw, gw), 0.0, denom_floor, "||g(w)||^2")
    t = 1.0 + _dot(gx, gy) / nx2 + _dot(gw, gy) / nw2
    if not math.isfinite(t):
        raise NonfiniteError("acceleration factor")
    return t


def beta_coeff(gx: Array, gw: Array, gy: Array, *, denom_floor: float = 1e-30) -> float:
    """Scalar coefficient beta = ||gy||^2 (1/gy.gx + 1/||gx||^2 + 1/gx.gw).

    Defined as 0 when ||gy||^2 = 0 (the sub-step is already exact), even if
    a denominator also degenerates.
    """
    ny2 = _dot(gy, gy)
    if not math.isfinite(ny2):
        raise NonfiniteError("||g(y)||^2")
    if ny2 == 0.0:
        return 0.0
    nx = math.sqrt(_dot(gx, gx))
    nw = math.sqrt(_dot(gw, gw))
    ny = math.sqrt(ny2)
    d1 = _guard(_dot(gy, gx), ny * nx, denom_floor, "g(y)^T g(x)")
    d2 = _guard(nx * nx, 0.0, denom_floor, "||g(x)||^2")
    d3 = _guard(_dot(gx, gw), nx * nw, denom_floor, "g(x)^T g(w)")
    beta = ny2 * (1.0 / d1 + 1.0 / d2 + 1.0 / d3)
    if not math.isfinite(beta):
        raise NonfiniteError("beta coefficient")
    return beta


def gamma_coeff(gy: Array, gz: Array, *, denom_floor: float = 1e-30) -> float:
    """Scalar coefficient gamma = ||gz||^2 / gz.gy, with gamma = 0 at gz = 0."""
    nz2 = _dot(gz, gz)
    if not math.isfinite(nz2):
        raise NonfiniteError("||g(z)||^2")
    if nz2 == 0.0:
        return 0.0
    ny = math.sqrt(_dot(gy, gy))
    den = _guard(_dot(gz, gy), math.sqrt(nz2) * ny, denom_floor, "g(z)^T g(y)")
    gamma = nz2 / den
    if not math.isfinite(gamma):
        raise NonfiniteError("gamma coefficient")
    return gamma


def _step_size(cfg: SolverConfig, gx: Array, gw: Array) -> float:
    if cfg.step_rule == "primal":
        return step_size_primal(gx, gw, denom_floor=cfg.denom_floor)
    return step_size_dual(gx, gw, denom_floor=cfg.denom_floor)


# -- shared run machinery -----------------------------------------------------

class _Run:
    """Bookkeeping shared by the iteration drivers."""

    def __init__(self, problem: Problem, cfg: SolverConfig, x0: Optional[Array]):
        self.problem = problem
        self.cfg = cfg
        self.tol = cfg.effective_tol
        self.start = time.perf_counter()
        self.trace = IterationTrace()
        self.grad_evals = 0
        x = problem.x0 if x0 is None else np.ascontiguousarray(x0, dtype=np.float64)
        if x.shape != (problem.dim,):
            raise ValueError("starting point does not match the problem dimension")
        self.x = x

    def grad(self, x: Array) -> Array:
        self.grad_evals += 1
        return self.problem.gradient(x)

    def gnorm(self, g: Array) -> float:
        if self.cfg.norm == "max":
            return float(np.max(np.abs(g)))
        return float(np.linalg.norm(g))

    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def finish(self, status: str, x: Array, k: int, gnorm: float,
               last_finite: Optional[Array] = None) -> RunResult:
        self.trace.add(k, gnorm, self.elapsed())
        x_final = x
        if status == STATUS_NONFINITE and not np.all(np.isfinite(x_final)):
            x_final = last_finite if last_finite is not None else x_final
        return RunResult(
            status=status,
            x_final=x_final,
            iterations=k,
            trace=self.trace,
            method=self.cfg.method,
            problem_id=self.problem.id,
            n=self.problem.dim,
            final_gnorm=gnorm,
            elapsed=self.elapsed(),
            grad_evals=self.grad_evals,
            tol=self.tol,
        )


def _require(cfg: SolverConfig, method: str):
    if cfg.method != method:
        raise ValueError(f"config selects method {cfg.method!r}, driver is {method!r}")


def _quiet_nonfinite(fn):
    # overflow/invalid values are expected data on divergent runs and are
    # turned into statuses, so keep NumPy from warning mid-iteration
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with np.errstate(over="ignore", invalid="ignore"):
            return fn(*args, **kwargs)
    return wrapper


@_quiet_nonfinite
def run_ss1(problem: Problem, cfg: SolverConfig, x0: Optional[Array] = None) -> RunResult:
    """One-step scheme: x+ = x - a g(x) with the closed-form step size."""
    _require(cfg, "ss1")
    run = _Run(problem, cfg, x0)
    x = run.x
    gx = run.grad(x)
    gnorm = run.gnorm(gx)
    x_prev = x
    for k in range(cfg.max_iter):
        if not math.isfinite(gnorm):
            return run.finish(STATUS_NONFINITE, x, k, gnorm, x_prev)
        if gnorm <= run.tol:
            return run.finish(STATUS_CONVERGED, x, k, gnorm)
        w = x + gx
        gw = run.grad(w)
        try:
            a = _step_size(cfg, gx, gw)
        except BreakdownError:
            return run.finish(STATUS_BREAKDOWN, x, k, gnorm)
        except NonfiniteError:
            return run.finish(STATUS_NONFINITE, x, k, gnorm, x_prev)
        run.trace.add(k, gnorm, run.elapsed(), alpha=a)
        x_prev = x
        x = x - a * gx
        gx = run.grad(x)
        gnorm = run.gnorm(gx)
    status = STATUS_CONVERGED if gnorm <= run.tol else STATUS_MAX_ITER
    if not math.isfinite(gnorm):
        status = STATUS_NONFINITE
    return run.finish(status, x, cfg.max_iter, gnorm, x_prev)


def run_ss2(problem: Problem, cfg: SolverConfig, x0: Optional[Array] = None) -> RunResult:
    """Two-step scheme with acceleration factor T.

    Per outer iteration: a is computed once at x, then
    y = x - a g(x), x+ = y - a T g(y). Three gradient evaluations
    per iteration (at x, w and y; the new iterate's gradient starts
    the next iteration).
    """
    _require(cfg, "ss2")
    return _run_multistep(problem, cfg, x0, third_step=False)


def run_ss3(problem: Problem, cfg: SolverConfig, x0: Optional[Array] = None) -> RunResult:
    """Three-step scheme: ss2 plus z -> x+ = z - a T g(z), reusing a and T."""
    _require(cfg, "ss3")
    return _run_multistep(problem, cfg, x0, third_step=True)


@_quiet_nonfinite
def _run_multistep(problem, cfg, x0, third_step: bool) -> RunResult:
    run = _Run(problem, cfg, x0)
    x = run.x
    gx = run.grad(x)
    gnorm = run.gnorm(gx)
    x_prev = x
    for k in range(cfg.max_iter):
        if not math.isfinite(gnorm):
            return run.finish(STATUS_NONFINITE, x, k, gnorm, x_prev)
        if gnorm <= run.tol:
            return run.finish(STATUS_CONVERGED, x, k, gnorm)
        w = x + gx
        gw = run.grad(w)
        try:
            a = _step_size(cfg, gx, gw)
            y = x - a * gx
            gy = run.grad(y)
            t = t_scalar(gx, gw, gy, denom_floor=cfg.denom_floor)
        except BreakdownError:
            return run.finish(STATUS_BREAKDOWN, x, k, gnorm)
        except NonfiniteError:
            return run.finish(STATUS_NONFINITE, x, k, gnorm, x_prev)
        run.trace.add(k, gnorm, run.elapsed(), alpha=a, t=t)
        x_prev = x
        x = y - (a * t) * gy
        if third_step:
            gz = run.grad(x)
            x = x - (a * t) * gz
        gx = run.grad(x)
        gnorm = run.gnorm(gx)
    status = STATUS_CONVERGED if gnorm <= run.tol else STATUS_MAX_ITER
    if not math.isfinite(gnorm):
        status = STATUS_NONFINITE
    return run.finish(status, x, cfg.max_iter, gnorm, x_prev)


def run_ss2_scalar(problem: Problem, cfg: SolverConfig, x0: Optional[Array] = None) -> RunResult:
    """Scalar-coefficient two-step scheme: x+ = x + (1 + beta) d, d = -a g(x)."""
    _require(cfg, "ss2s")
    return _run_scalar(problem, cfg, x0, third_step=False)


def run_ss3_scalar(problem: Problem, cfg: SolverConfig, x0: Optional[Array] = None) -> RunResult:
    """Scalar-coefficient three-step scheme: x+ = x + (1 + beta + beta*gamma) d."""
    _require(cfg, "ss3s")
    return _run_scalar(problem, cfg, x0, third_step=True)


@_quiet_nonfinite
def _run_scalar(problem, cfg, x0, third_step: bool) -> RunResult:
    run = _Run(problem, cfg, x0)
    x = run.x
    gx = run.grad(x)
    gnorm = run.gnorm(gx)
    x_prev = x
    for k in range(cfg.max_iter):
        if not math.isfinite(gnorm):
            return run.finish(STATUS_NONFINITE, x, k, gnorm, x_prev)
        if gnorm <= run.tol:
            return run.finish(STATUS_CONVERGED, x, k, gnorm)
        w = x + gx
        gw = run.grad(w)
        try:
            a = _step_size(cfg, gx, gw)
            d = -a * gx
            y = x + d
            gy = run.grad(y)
            beta = beta_coeff(gx, gw, gy, denom_floor=cfg.denom_floor)
            if third_step:
                z = x + (1.0 + beta) * d
                gz = run.grad(z)
                gamma = gamma_coeff(gy, gz, denom_floor=cfg.denom_floor)
                factor = 1.0 + beta + beta * gamma
            else:
                gamma = _NAN
                factor = 1.0 + beta
        except BreakdownError:
            return run.finish(STATUS_BREAKDOWN, x, k, gnorm)
        except NonfiniteError:
            return run.finish(STATUS_NONFINITE, x, k, gnorm, x_prev)
        run.trace.add(k, gnorm, run.elapsed(), alpha=a, beta=beta, gamma=gamma)
        x_prev = x
        x = x + factor * d
        gx = run.grad(x)
        gnorm = run.gnorm(gx)
    status = STATUS_CONVERGED if gnorm <= run.tol else STATUS_MAX_ITER
    if not math.isfinite(gnorm):
        status = STATUS_NONFINITE
    return run.finish(status, x, cfg.max_iter, gnorm, x_prev)


@_quiet_nonfinite
def run_bb(problem: Problem, cfg: SolverConfig, x0: Optional[Array] = None) -> RunResult:
    """Barzilai-Borwein iteration x+ = x - a g(x) from secant pairs.

    bb2 (default): a = ||s||^2 / s.y; bb1: a = s.y / ||y||^2, where
    s = x_k - x_{k-1} and y = g_k - g_{k-1}. The first iteration has no
    secant pair and uses the primal closed-form step; a nonpositive or
    non-finite secant step falls back to it as well.
    """
    _require(cfg, "bb")
    run = _Run(problem, cfg, x0)
    x = run.x
    gx = run.grad(x)
    gnorm = run.gnorm(gx)
    x_prev: Optional[Array] = None
    g_prev: Optional[Array] = None
    for k in range(cfg.max_iter):
        if not math.isfinite(gnorm):
            return run.finish(STATUS_NONFINITE, x, k, gnorm, x_prev)
        if gnorm <= run.tol:
            return run.finish(STATUS_CONVERGED, x, k, gnorm)
        a: Optional[float] = None
        if x_prev is not None:
            s = x - x_prev
            yv = gx - g_prev
            try:
                if cfg.bb_variant == "bb2":
                    den = _guard(_dot(s, yv),
                                 float(np.linalg.norm(s) * np.linalg.norm(yv)),
                                 cfg.denom_floor, "s^T y")
                    a = _dot(s, s) / den
                else:
                    den = _guard(_dot(yv, yv), 0.0, cfg.denom_floor, "||y||^2")
                    a = _dot(s, yv) / den
            except BreakdownError:
                return run.finish(STATUS_BREAKDOWN, x, k, gnorm)
            except NonfiniteError:
                return run.finish(STATUS_NONFINITE, x, k, gnorm, x_prev)
            if not math.isfinite(a) or a <= 0.0:
                a = None  # fall back to the closed-form step
        if a is None:
            w = x + gx
            gw = run.grad(w)
            try:
                a = step_size_primal(gx, gw, denom_floor=cfg.denom_floor)
            except BreakdownError:
                return run.finish(STATUS_BREAKDOWN, x, k, gnorm)
            except NonfiniteError:
                return run.finish(STATUS_NONFINITE, x, k, gnorm, x_prev)
        run.trace.add(k, gnorm, run.elapsed(), alpha=a)
        x_prev, g_prev = x, gx
        x = x - a * gx
        gx = run.grad(x)
        gnorm = run.gnorm(gx)
    status = STATUS_CONVERGED if gnorm <= run.tol else STATUS_MAX_ITER
    if not math.isfinite(gnorm):
        status = STATUS_NONFINITE
    return run.finish(status, x, cfg.max_iter, gnorm, x_prev)


@_quiet_nonfinite
def run_cg_quadratic(q: QuadraticOperator, cfg: SolverConfig,
                     x0: Optional[Array] = None,
                     problem_id: str = "quadratic") -> RunResult:
    """Standard linear conjugate gradient on A x = b, stopping on ||b - A x||."""
    _require(cfg, "cg")
    n = q.n
    start = time.perf_counter()
    trace = IterationTrace()
    x = np.zeros(n) if x0 is None else np.ascontiguousarray(x0, dtype=np.float64)
    if x.shape != (n,):
        raise ValueError("starting point does not match the operator dimension")
    matvecs = 1
    r = q.rhs - q.matvec(x)
    rs = _dot(r, r)
    gnorm = math.sqrt(rs) if cfg.norm == "l2" else float(np.max(np.abs(r)))
    p = r.copy()
    tol = cfg.effective_tol

    def _finish(status, k):
        trace.add(k, gnorm, time.perf_counter() - start)
        return RunResult(status, x, k, trace, "cg", problem_id, n, gnorm,
                         time.perf_counter() - start, matvecs, tol)

    for k in range(cfg.max_iter):
        if not math.isfinite(gnorm):
            return _finish(STATUS_NONFINITE, k)
        if gnorm <= tol:
            return _finish(STATUS_CONVERGED, k)
        ap = q.matvec(p)
        matvecs += 1
        pap = _dot(p, ap)
        if not math.isfinite(pap):
            return _finish(STATUS_NONFINITE, k)
        if pap <= 0.0:
            # nonpositive curvature: the operator is not positive definite
            return _finish(STATUS_BREAKDOWN, k)
        a = rs / pap
        trace.add(k, gnorm, time.perf_counter() - start, alpha=a)
        x = x + a * p
        r = r - a * ap
        rs_new = _dot(r, r)
        gnorm = math.sqrt(rs_new) if cfg.norm == "l2" else float(np.max(np.abs(r)))
        p = r + (rs_new / rs) * p
        rs = rs_new
    status = STATUS_CONVERGED if gnorm <= tol else STATUS_MAX_ITER
    if not math.isfinite(gnorm):
        status = STATUS_NONFINITE
    return _finish(status, cfg.max_iter)


_DRIVERS = {
    "ss1": run_ss1,
    "ss2": run_ss2,
    "ss3": run_ss3,
    "ss2s": run_ss2_scalar,
    "ss3s": run_ss3_scalar,
    "bb": run_bb,
}


def solve(problem: Problem, cfg: SolverConfig, x0: Optional[Array] = None) -> RunResult:
    """Dispatch a run to the driver selected by ``cfg.method``."""
    if cfg.method == "cg":
        if problem.operator is None:
            raise ValueError(
                f"method 'cg' needs a quadratic problem; {problem.id} has no operator"
            )
        res = run_cg_quadratic(problem.operator, cfg,
                               problem.x0 if x0 is None else x0,
                               problem_id=problem.id)
        return res
    return _DRIVERS[cfg.method](problem, cfg, x0)
