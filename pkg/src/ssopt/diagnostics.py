"""Convergence-order estimation and run summaries.

The approximate computational order of convergence (ACOC) of a residual
sequence r_0, r_1, ... is the log-ratio estimator

    rho_k = log(r_{k+1} / r_k) / log(r_k / r_{k-1}),

computed wherever both ratios are well defined. A power-law sequence
r_{k+1} = r_k^p yields rho_k = p exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .solver import RunResult

#: residuals below this are dropped to avoid log underflow artifacts
RESIDUAL_FLOOR = 1e-290

_NAN = float("nan")


@dataclass
class AcocReport:
    """Per-iteration order estimates over a residual sequence.

    ``rho[j]`` estimates the order at position j+1 of the usable residuals
    (NaN where a ratio degenerates); ``rho_final`` is the last well-defined
    value, or None. ``residuals`` echoes the usable prefix that was analyzed.
    """

    rho: list
    rho_final: Optional[float]
    residuals: list
    status: str = "ok"

    @property
    def defined(self) -> list:
        return [r for r in self.rho if not math.isnan(r)]


def acoc(residuals: Sequence[float]) -> AcocReport:
    """Estimate per-iteration convergence orders from residual norms.

    Input residuals must be positive; the sequence is truncated at the first
    nonpositive, non-finite or underflowing (< 1e-290) entry. Fewer than
    three usable residuals produce an empty report with an explanatory
    status instead of fabricated values.
    """
    usable = []
    for r in residuals:
        r = float(r)
        if not math.isfinite(r) or r <= 0.0 or r < RESIDUAL_FLOOR:
            break
        usable.append(r)
    if len(usable) < 3:
        return AcocReport([], None, usable,
                          status=f"needs at least 3 usable residuals, got {len(usable)}")
    rho = []
    for i in range(1, len(usable) - 1):
        ratio_num = usable[i + 1] / usable[i]
        ratio_den = usable[i] / usable[i - 1]
        if ratio_num == 1.0 or ratio_den == 1.0:
            rho.append(_NAN)
            continue
        num = math.log(ratio_num)
        den = math.log(ratio_den)
        if den == 0.0 or not math.isfinite(num) or not math.isfinite(den):
            rho.append(_NAN)
            continue
        rho.append(num / den)
    defined = [r for r in rho if not math.isnan(r)]
    rho_final = defined[-1] if defined else None
    status = "ok" if defined else "no defined order estimates"
    return AcocReport(rho, rho_final, usable, status=status)


def acoc_of_run(result: RunResult) -> AcocReport:
    """ACOC over a run's recorded residual-norm history."""
    return acoc(result.trace.gnorm)


def summarize(result: RunResult) -> dict:
    """One table-row summary of a run.

    Keys mirror the benchmark report schema: method, problem, n, iterations,
    final_gnorm, cpu_seconds and the verbatim status string.
    """
    if len(result.trace) == 0:
        raise ValueError("cannot summarize a run with an empty trace")
    return {
        "method": result.method,
        "problem": result.problem_id,
        "n": result.n,
        "iterations": result.iterations,
        "final_gnorm": result.final_gnorm,
        "cpu_seconds": result.elapsed,
        "status": result.status,
    }
