"""Monte Carlo simulator for vehicle-to-infrastructure attachment policies
in heterogeneous LTE + mmWave networks."""
from ._version import __version__
from .channel import (
    LinkState,
    LinkTable,
    achievable_rate,
    build_link_table,
    cumulative_gain,
    los_probability_lte,
    los_probability_mmw,
    path_loss,
    snr_db,
)
from .config import (
    ChannelParams,
    ConfigError,
    ScenarioConfig,
    TierRadio,
    config_from_dict,
    load_config,
    validate_config,
)
from .engine import (
    AssociationState,
    RunResult,
    collect_campaign,
    derive_run_seed,
    initial_attach,
    realized_rates,
    run_campaign,
    run_once,
    steady_state,
)
from .geometry import (
    BaseStation,
    Position,
    Snapshot,
    Tier,
    VehicularNode,
    build_snapshot,
    deploy_base_stations,
    deploy_vehicles,
    in_measurement_region,
)
from .metrics import (
    CellSummary,
    RunMetrics,
    compute_run_metrics,
    jain_index,
    lte_ratio,
    mean_rate_per_class,
    satisfaction_ratio,
    summarize,
    summarize_results,
    worst_decile_mean,
)
from .output import CSV_COLUMNS, OutputError, emit_results, write_results
from .policy import AttachmentDecision, Policy, select_ms, select_mr, select_ra

__all__ = [
    "__version__",
    "AssociationState", "AttachmentDecision", "BaseStation", "CellSummary",
    "ChannelParams", "ConfigError", "CSV_COLUMNS", "LinkState", "LinkTable",
    "OutputError", "Policy", "Position", "RunMetrics", "RunResult",
    "ScenarioConfig", "Snapshot", "Tier", "TierRadio", "VehicularNode",
    "achievable_rate", "build_link_table", "build_snapshot",
    "collect_campaign", "compute_run_metrics", "config_from_dict",
    "cumulative_gain", "deploy_base_stations", "deploy_vehicles",
    "derive_run_seed", "emit_results", "in_measurement_region",
    "initial_attach", "jain_index", "load_config", "los_probability_lte",
    "los_probability_mmw", "lte_ratio", "mean_rate_per_class", "path_loss",
    "realized_rates", "run_campaign", "run_once", "satisfaction_ratio",
    "select_ms", "select_mr", "select_ra", "snr_db", "steady_state",
    "summarize", "summarize_results", "validate_config", "worst_decile_mean",
    "write_results",
]
