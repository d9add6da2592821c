"""Per-run figures of merit and their cross-run aggregation.

All metrics are computed over in-region vehicles only. A class with no
in-region members in a run yields NaN (an undefined marker) and is skipped
when averaging across runs, never imputed as zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import RunResult, TIER_LTE

N_CLASSES = 4


def mean_rate_per_class(rates: np.ndarray, classes: np.ndarray, k: int) -> float:
    """Average rate of class-k vehicles; NaN when the class is empty."""
    sel = rates[classes == k]
    return float(sel.mean()) if sel.size else math.nan


def worst_decile_mean(rates: np.ndarray, classes: np.ndarray, k: int) -> float:
    """Mean of the lowest ceil(10%) of class-k rates; NaN when empty."""
    sel = np.sort(rates[classes == k])
    if sel.size == 0:
        return math.nan
    take = math.ceil(0.1 * sel.size)
    return float(sel[:take].mean())


def satisfaction_ratio(rates: np.ndarray, required: np.ndarray) -> float:
    """Fraction of vehicles whose realized rate meets their requirement.

    Unattached vehicles carry rate 0 and count as unsatisfied.
    """
    if rates.size == 0:
        return math.nan
    return float(np.mean(rates >= required))


def lte_ratio(tier: np.ndarray) -> float:
    """Fraction of vehicles served by the LTE tier (unattached vehicles
    count in the denominator only)."""
    if tier.size == 0:
        return math.nan
    return float(np.mean(tier == TIER_LTE))


def jain_index(rates: np.ndarray, classes: np.ndarray, k: int) -> float:
    """Jain's fairness index over class-k rates; NaN for an empty class or
    an all-zero rate vector (0/0)."""
    sel = rates[classes == k]
    if sel.size == 0:
        return math.nan
    total = sel.sum()
    squares = np.square(sel).sum()
    if squares == 0.0:
        return math.nan
    return float(total * total / (sel.size * squares))


@dataclass(frozen=True)
class RunMetrics:
    """One run reduced to the five evaluation metrics."""

    lambda_m: float
    policy_name: str
    p_lte: float
    p_sat: float
    mean_rate_bps: tuple[float, float, float, float]
    p10_bps: tuple[float, float, float, float]
    jain: tuple[float, float, float, float]
    converged: bool
    run_index: int | None = None


def compute_run_metrics(result: RunResult) -> RunMetrics:
    mask = result.in_region
    rates = result.rate_bps[mask]
    classes = result.class_k[mask]
    required = result.required_rate_bps[mask]
    tier = result.tier[mask]
    ks = range(1, N_CLASSES + 1)
    return RunMetrics(
        lambda_m=result.lambda_m,
        policy_name=result.policy.value,
        p_lte=lte_ratio(tier),
        p_sat=satisfaction_ratio(rates, required),
        mean_rate_bps=tuple(mean_rate_per_class(rates, classes, k) for k in ks),
        p10_bps=tuple(worst_decile_mean(rates, classes, k) for k in ks),
        jain=tuple(jain_index(rates, classes, k) for k in ks),
        converged=result.converged,
        run_index=result.run_index,
    )


@dataclass(frozen=True)
class CellSummary:
    """Cross-run averages for one (density, policy) cell, with standard
    errors (NaN when fewer than two defined runs)."""

    lambda_m: float
    policy_name: str
    run_count: int
    nonconverged_runs: int
    p_lte: float
    p_lte_se: float
    p_sat: float
    p_sat_se: float
    mean_rate_bps: tuple[float, ...]
    mean_rate_se_bps: tuple[float, ...]
    p10_bps: tuple[float, ...]
    p10_se_bps: tuple[float, ...]
    jain: tuple[float, ...]
    jain_se: tuple[float, ...]


def _nan_mean_se(values: np.ndarray) -> tuple[float, float]:
    defined = values[~np.isnan(values)]
    if defined.size == 0:
        return math.nan, math.nan
    mean = float(defined.mean())
    if defined.size < 2:
        return mean, math.nan
    se = float(defined.std(ddof=1) / math.sqrt(defined.size))
    return mean, se


def summarize(run_metrics) -> CellSummary:
    """Aggregate the per-run metrics of one cell (undefined markers are
    skipped; standard error = sample stdev / sqrt(defined runs))."""
    rows = sorted(run_metrics,
                  key=lambda r: (r.run_index if r.run_index is not None else 0))
    if not rows:
        raise ValueError("summarize requires at least one run")
    first = rows[0]
    if any(r.lambda_m != first.lambda_m or r.policy_name != first.policy_name
           for r in rows):
        raise ValueError("summarize expects runs from a single cell")
    p_lte, p_lte_se = _nan_mean_se(np.array([r.p_lte for r in rows]))
    p_sat, p_sat_se = _nan_mean_se(np.array([r.p_sat for r in rows]))
    mean_rate, mean_rate_se, p10, p10_se, jain, jain_se = ([] for _ in range(6))
    for k in range(N_CLASSES):
        m, se = _nan_mean_se(np.array([r.mean_rate_bps[k] for r in rows]))
        mean_rate.append(m)
        mean_rate_se.append(se)
        m, se = _nan_mean_se(np.array([r.p10_bps[k] for r in rows]))
        p10.append(m)
        p10_se.append(se)
        m, se = _nan_mean_se(np.array([r.jain[k] for r in rows]))
        jain.append(m)
        jain_se.append(se)
    return CellSummary(
        lambda_m=first.lambda_m,
        policy_name=first.policy_name,
        run_count=len(rows),
        nonconverged_runs=sum(1 for r in rows if not r.converged),
        p_lte=p_lte, p_lte_se=p_lte_se,
        p_sat=p_sat, p_sat_se=p_sat_se,
        mean_rate_bps=tuple(mean_rate), mean_rate_se_bps=tuple(mean_rate_se),
        p10_bps=tuple(p10), p10_se_bps=tuple(p10_se),
        jain=tuple(jain), jain_se=tuple(jain_se),
    )


def summarize_results(results) -> CellSummary:
    """Convenience: summarize raw RunResults of one cell."""
    return summarize(compute_run_metrics(r) for r in results)
