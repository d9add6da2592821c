"""Stable machine-readable result emission (CSV / JSON lines).

Every output file starts with a '#'-prefixed comment block echoing the
resolved configuration and tool version, so a results file is always
self-describing.
"""
from __future__ import annotations

import json
import math
import os
from typing import IO, Iterable

from ._version import __version__
from .config import ScenarioConfig
from .engine import RunResult, TIER_NAMES
from .metrics import CellSummary, N_CLASSES

CSV_COLUMNS = (
    "lambda_m", "policy", "p_lte", "p_sat",
    "mean_rate_1_bps", "p10_1_bps", "jain_1",
    "mean_rate_2_bps", "p10_2_bps", "jain_2",
    "mean_rate_3_bps", "p10_3_bps", "jain_3",
    "mean_rate_4_bps", "p10_4_bps", "jain_4",
    "run_count", "seed", "nonconverged_runs",
)

RUN_DUMP_COLUMNS = ("vn_id", "class_k", "in_region", "tier", "bs_id",
                    "required_rate_bps", "rate_bps")


class OutputError(RuntimeError):
    """I/O failure while writing results; carries the destination path."""


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _round6(value: float) -> float | None:
    if math.isnan(value):
        return None
    return float(f"{value:.6g}")


def config_header_lines(config: ScenarioConfig) -> list[str]:
    return [
        f"# v2isim {__version__}",
        "# config " + json.dumps(config.to_dict(), sort_keys=True),
    ]


def _summary_cells(summary: CellSummary, seed: int) -> list[str]:
    cells = [_fmt(summary.lambda_m), summary.policy_name,
             _fmt(summary.p_lte), _fmt(summary.p_sat)]
    for k in range(N_CLASSES):
        cells += [_fmt(summary.mean_rate_bps[k]), _fmt(summary.p10_bps[k]),
                  _fmt(summary.jain[k])]
    cells += [str(summary.run_count), str(seed),
              str(summary.nonconverged_runs)]
    return cells


def _summary_record(summary: CellSummary, seed: int) -> dict:
    record: dict = {
        "lambda_m": _round6(summary.lambda_m),
        "policy": summary.policy_name,
        "p_lte": _round6(summary.p_lte),
        "p_sat": _round6(summary.p_sat),
    }
    for k in range(N_CLASSES):
        record[f"mean_rate_{k + 1}_bps"] = _round6(summary.mean_rate_bps[k])
        record[f"p10_{k + 1}_bps"] = _round6(summary.p10_bps[k])
        record[f"jain_{k + 1}"] = _round6(summary.jain[k])
    record["run_count"] = summary.run_count
    record["seed"] = seed
    record["nonconverged_runs"] = summary.nonconverged_runs
    return record


def _canonical(summaries: Iterable[CellSummary]) -> list[CellSummary]:
    order = {"MS": 0, "MR": 1, "RA": 2}
    return sorted(summaries,
                  key=lambda s: (s.lambda_m, order.get(s.policy_name, 99)))


def write_results(summaries: Iterable[CellSummary], fmt: str, stream: IO[str],
                  config: ScenarioConfig) -> None:
    for line in config_header_lines(config):
        stream.write(line + "\n")
    rows = _canonical(summaries)
    seed = config.master_seed
    if fmt == "csv":
        stream.write(",".join(CSV_COLUMNS) + "\n")
        for summary in rows:
            stream.write(",".join(_summary_cells(summary, seed)) + "\n")
    elif fmt == "jsonl":
        for summary in rows:
            stream.write(json.dumps(_summary_record(summary, seed),
                                    sort_keys=False) + "\n")
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def write_run_dump(result: RunResult, stream: IO[str],
                   config: ScenarioConfig) -> None:
    """Per-vehicle records of a single run, for debugging."""
    for line in config_header_lines(config):
        stream.write(line + "\n")
    stream.write("# cell lambda_m={} policy={} run_index={} converged={}\n".format(
        _fmt(result.lambda_m), result.policy.value, result.run_index,
        result.converged))
    stream.write(",".join(RUN_DUMP_COLUMNS) + "\n")
    for i in range(result.n_vn):
        stream.write(",".join([
            str(i),
            str(int(result.class_k[i])),
            str(int(result.in_region[i])),
            TIER_NAMES[int(result.tier[i])],
            str(int(result.bs_id[i])),
            _fmt(float(result.required_rate_bps[i])),
            _fmt(float(result.rate_bps[i])),
        ]) + "\n")


def emit_results(summaries: Iterable[CellSummary], fmt: str,
                 dest: str | os.PathLike[str] | IO[str] | None,
                 config: ScenarioConfig) -> None:
    """Write summaries to a path (or stream; None means stdout)."""
    if dest is None or hasattr(dest, "write"):
        import sys

        write_results(summaries, fmt, dest or sys.stdout, config)
        return
    try:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            write_results(summaries, fmt, fh, config)
    except OSError as exc:
        raise OutputError(f"cannot write results to {dest}: {exc}") from exc
