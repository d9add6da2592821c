"""Command-line entry point: configure, run the campaign, emit results."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Sequence

from .config import ConfigError, ScenarioConfig, load_config, validate_config
from .engine import derive_run_seed, run_campaign, run_once
from .metrics import compute_run_metrics, summarize
from .output import OutputError, emit_results, write_run_dump
from .policy import Policy

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    # flag mistakes are configuration errors, keep exit code 1 for them
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _parse_lambda_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"--lambda-m: {exc}") from exc
    if not values:
        raise ConfigError("--lambda-m: empty list")
    return values


def _parse_dump_spec(text: str) -> tuple[float, str, int]:
    try:
        cell, index_text = text.rsplit(",", 1)
        lambda_text, policy_name = cell.split(":")
        return float(lambda_text), policy_name.strip().upper(), int(index_text)
    except ValueError as exc:
        raise ConfigError(
            f"--dump-run: expected LAMBDA:POLICY,INDEX (e.g. 4:MS,0), got {text!r}"
        ) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="v2isim",
        description="Monte Carlo comparison of vehicle attachment policies "
                    "in a heterogeneous LTE + mmWave network.")
    parser.add_argument("--config", metavar="PATH",
                        help="JSON scenario config ('-' reads stdin); "
                             "defaults apply for absent keys")
    parser.add_argument("--policy", action="append", choices=["MS", "MR", "RA"],
                        help="policy to simulate (repeatable, overrides config)")
    parser.add_argument("--lambda-m", metavar="LIST", dest="lambda_m",
                        help="comma-separated mmWave densities per km^2 "
                             "(overrides the config grid)")
    parser.add_argument("--runs", type=int, metavar="N",
                        help="Monte Carlo runs per cell (overrides n_sim)")
    parser.add_argument("--seed", type=int, metavar="N",
                        help="master seed (overrides config)")
    parser.add_argument("--format", choices=["csv", "jsonl"], default="csv",
                        help="output format (default csv)")
    parser.add_argument("--out", metavar="PATH",
                        help="output file (default: standard output)")
    parser.add_argument("--parallel", type=int, default=1, metavar="N",
                        help="worker processes (default 1; output bytes do "
                             "not depend on this)")
    parser.add_argument("--dump-run", metavar="CELL,INDEX",
                        help="emit the per-vehicle records of one run, e.g. "
                             "4:MS,0, instead of running the campaign")
    return parser


def _effective_config(args: argparse.Namespace) -> ScenarioConfig:
    config = load_config(args.config) if args.config else ScenarioConfig()
    overrides = {}
    if args.policy:
        overrides["policies"] = tuple(dict.fromkeys(args.policy))
    if args.lambda_m:
        overrides["mmw_density_grid_per_km2"] = _parse_lambda_list(args.lambda_m)
    if args.runs is not None:
        overrides["n_sim"] = args.runs
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if overrides:
        config = replace(config, **overrides)
        validate_config(config)
    return config


def _dump_run(config: ScenarioConfig, spec: str, dest: str | None) -> None:
    lambda_m, policy_name, run_index = _parse_dump_spec(spec)
    try:
        policy = Policy(policy_name)
    except ValueError as exc:
        raise ConfigError(f"--dump-run: unknown policy {policy_name!r}") from exc
    if run_index < 0 or run_index >= config.n_sim:
        raise ConfigError(f"--dump-run: run index {run_index} outside 0..{config.n_sim - 1}")
    seed = derive_run_seed(config.master_seed, lambda_m, policy, run_index)
    result = run_once(config, lambda_m, policy, seed)
    result.run_index = run_index
    if dest is None:
        write_run_dump(result, sys.stdout, config)
        return
    try:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            write_run_dump(result, fh, config)
    except OSError as exc:
        raise OutputError(f"cannot write run dump to {dest}: {exc}") from exc


def _run_campaign(config: ScenarioConfig, args: argparse.Namespace) -> None:
    per_cell: dict[tuple[float, str], list] = {}
    cells_total = len(config.mmw_density_grid_per_km2) * len(config.policies)
    done_runs = 0
    for result in run_campaign(config, workers=max(1, args.parallel)):
        key = (result.lambda_m, result.policy.value)
        per_cell.setdefault(key, []).append(compute_run_metrics(result))
        done_runs += 1
        if done_runs % config.n_sim == 0:
            print(f"[v2isim] cell {len(per_cell)}/{cells_total} done "
                  f"(lambda_m={key[0]:g}, policy={key[1]})",
                  file=sys.stderr, flush=True)
    summaries = [summarize(rows) for rows in per_cell.values()]
    emit_results(summaries, args.format, args.out, config)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _effective_config(args)
        if args.dump_run:
            _dump_run(config, args.dump_run, args.out)
        else:
            _run_campaign(config, args)
    except ConfigError as exc:
        print(f"v2isim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OutputError, OSError) as exc:
        print(f"v2isim: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
