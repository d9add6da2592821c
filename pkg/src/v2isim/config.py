"""Scenario configuration: defaults, JSON ingestion, validation.

All physical quantities carry explicit unit suffixes in their key names
(_db, _dbm, _hz, _bps, _km2, _m) so a config file can never be ambiguous
about units.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Any, IO

POLICY_NAMES = ("MS", "MR", "RA")
VN_MODES = ("PER_MMW_BS", "FIXED")

DEFAULT_MMW_DENSITY_GRID = tuple(float(x) for x in range(4, 84, 4))


class ConfigError(ValueError):
    """Malformed configuration document or invariant violation."""


@dataclass(frozen=True)
class TierRadio:
    """Radio parameters of one base-station tier."""

    tx_power_dbm: float
    bandwidth_hz: float
    carrier_hz: float
    array_elements: int


@dataclass(frozen=True)
class ChannelParams:
    """Channel model knobs: noise, geometry heights, antenna arrays and the
    path-loss coefficients for both tiers (all overridable so golden values
    can be pinned)."""

    noise_psd_dbm_per_hz: float = -174.0
    bs_height_m: float = 30.0
    vn_height_m: float = 2.0
    min_distance_m: float = 1.0
    vn_array_elements: int = 16
    # reserved: accepted in config files but only `false` is implemented
    shadow_fading_enabled: bool = False
    # test hook: when set, every link uses this LOS probability
    los_probability_override: float | None = None
    lte: TierRadio = field(
        default_factory=lambda: TierRadio(46.0, 20e6, 2.4e9, 1)
    )
    mmw: TierRadio = field(
        default_factory=lambda: TierRadio(27.0, 1e9, 28e9, 64)
    )
    # LTE path loss, dB, distance in km
    lte_pl_los_intercept_db: float = 103.4
    lte_pl_los_distance_slope_db: float = 24.2
    lte_pl_nlos_intercept_db: float = 131.1
    lte_pl_nlos_distance_slope_db: float = 42.8
    # mmWave path loss, dB, distance in m, frequency in GHz
    mmw_pl_los_intercept_db: float = 32.4
    mmw_pl_los_distance_slope_db: float = 21.0
    mmw_pl_los_frequency_slope_db: float = 20.0
    mmw_pl_nlos_intercept_db: float = 22.4
    mmw_pl_nlos_distance_slope_db: float = 35.3
    mmw_pl_nlos_frequency_slope_db: float = 21.3
    mmw_pl_nlos_height_slope_db: float = 0.3


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of a simulation campaign."""

    area_km2: float = 1.0
    lte_density_per_km2: float = 4.0
    mmw_density_grid_per_km2: tuple[float, ...] = DEFAULT_MMW_DENSITY_GRID
    policies: tuple[str, ...] = POLICY_NAMES
    vn_mode: str = "PER_MMW_BS"
    vns_per_mmw_bs: float = 10.0
    fixed_vn_count: int = 500
    n_sim: int = 2000
    master_seed: int = 1
    snr_threshold_db: float = -5.0
    class_requirements_bps: tuple[float, ...] = (1e6, 10e6, 100e6, 1200e6)
    class_probabilities: tuple[float, ...] = (0.25, 0.25, 0.25, 0.25)
    # x_min, x_max, y_min, y_max in meters; None -> central half-side square
    measurement_region_m: tuple[float, float, float, float] | None = None
    no_change_window_multiplier: float = 3.0
    pick_cap_multiplier: float = 50.0
    channel: ChannelParams = field(default_factory=ChannelParams)

    @property
    def area_side_m(self) -> float:
        return math.sqrt(self.area_km2) * 1000.0

    def resolved_measurement_region(self) -> tuple[float, float, float, float]:
        if self.measurement_region_m is not None:
            return self.measurement_region_m
        side = self.area_side_m
        return (side / 4.0, 3.0 * side / 4.0, side / 4.0, 3.0 * side / 4.0)

    def resolved(self) -> "ScenarioConfig":
        """Copy with every defaulted field made explicit."""
        return replace(self, measurement_region_m=self.resolved_measurement_region())

    def to_dict(self) -> dict[str, Any]:
        cfg = self.resolved()
        ch = cfg.channel
        return {
            "area_km2": cfg.area_km2,
            "lte_density_per_km2": cfg.lte_density_per_km2,
            "mmw_density_grid_per_km2": list(cfg.mmw_density_grid_per_km2),
            "policies": list(cfg.policies),
            "vn_mode": cfg.vn_mode,
            "vns_per_mmw_bs": cfg.vns_per_mmw_bs,
            "fixed_vn_count": cfg.fixed_vn_count,
            "n_sim": cfg.n_sim,
            "master_seed": cfg.master_seed,
            "snr_threshold_db": cfg.snr_threshold_db,
            "class_requirements_bps": list(cfg.class_requirements_bps),
            "class_probabilities": list(cfg.class_probabilities),
            "measurement_region_m": list(cfg.measurement_region_m),
            "no_change_window_multiplier": cfg.no_change_window_multiplier,
            "pick_cap_multiplier": cfg.pick_cap_multiplier,
            "channel": {
                "noise_psd_dbm_per_hz": ch.noise_psd_dbm_per_hz,
                "bs_height_m": ch.bs_height_m,
                "vn_height_m": ch.vn_height_m,
                "min_distance_m": ch.min_distance_m,
                "vn_array_elements": ch.vn_array_elements,
                "shadow_fading_enabled": ch.shadow_fading_enabled,
                "los_probability_override": ch.los_probability_override,
                "lte": _tier_to_dict(ch.lte),
                "mmw": _tier_to_dict(ch.mmw),
                "lte_pl_los_intercept_db": ch.lte_pl_los_intercept_db,
                "lte_pl_los_distance_slope_db": ch.lte_pl_los_distance_slope_db,
                "lte_pl_nlos_intercept_db": ch.lte_pl_nlos_intercept_db,
                "lte_pl_nlos_distance_slope_db": ch.lte_pl_nlos_distance_slope_db,
                "mmw_pl_los_intercept_db": ch.mmw_pl_los_intercept_db,
                "mmw_pl_los_distance_slope_db": ch.mmw_pl_los_distance_slope_db,
                "mmw_pl_los_frequency_slope_db": ch.mmw_pl_los_frequency_slope_db,
                "mmw_pl_nlos_intercept_db": ch.mmw_pl_nlos_intercept_db,
                "mmw_pl_nlos_distance_slope_db": ch.mmw_pl_nlos_distance_slope_db,
                "mmw_pl_nlos_frequency_slope_db": ch.mmw_pl_nlos_frequency_slope_db,
                "mmw_pl_nlos_height_slope_db": ch.mmw_pl_nlos_height_slope_db,
            },
        }


def _tier_to_dict(t: TierRadio) -> dict[str, Any]:
    return {
        "tx_power_dbm": t.tx_power_dbm,
        "bandwidth_hz": t.bandwidth_hz,
        "carrier_hz": t.carrier_hz,
        "array_elements": t.array_elements,
    }


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _as_float(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _as_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{path}: expected a boolean, got {value!r}")
    return value


def _as_float_list(value: Any, path: str, length: int | None = None) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{path}: expected a list, got {value!r}")
    if length is not None and len(value) != length:
        raise ConfigError(f"{path}: expected {length} entries, got {len(value)}")
    return tuple(_as_float(v, f"{path}[{i}]") for i, v in enumerate(value))


def _check_keys(doc: dict[str, Any], allowed: set[str], path: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        prefix = f"{path}." if path else ""
        raise ConfigError(f"unknown key: {prefix}{unknown[0]}")


_TIER_KEYS = {"tx_power_dbm", "bandwidth_hz", "carrier_hz", "array_elements"}

_CHANNEL_KEYS = {
    "noise_psd_dbm_per_hz", "bs_height_m", "vn_height_m", "min_distance_m",
    "vn_array_elements", "shadow_fading_enabled", "los_probability_override",
    "lte", "mmw",
    "lte_pl_los_intercept_db", "lte_pl_los_distance_slope_db",
    "lte_pl_nlos_intercept_db", "lte_pl_nlos_distance_slope_db",
    "mmw_pl_los_intercept_db", "mmw_pl_los_distance_slope_db",
    "mmw_pl_los_frequency_slope_db", "mmw_pl_nlos_intercept_db",
    "mmw_pl_nlos_distance_slope_db", "mmw_pl_nlos_frequency_slope_db",
    "mmw_pl_nlos_height_slope_db",
}

_TOP_KEYS = {
    "area_km2", "lte_density_per_km2", "mmw_density_grid_per_km2", "policies",
    "vn_mode", "vns_per_mmw_bs", "fixed_vn_count", "n_sim", "master_seed",
    "snr_threshold_db", "class_requirements_bps", "class_probabilities",
    "measurement_region_m", "no_change_window_multiplier",
    "pick_cap_multiplier", "channel",
}


def _tier_from_dict(doc: dict[str, Any], base: TierRadio, path: str) -> TierRadio:
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected an object")
    _check_keys(doc, _TIER_KEYS, path)
    kwargs: dict[str, Any] = {}
    for key in ("tx_power_dbm", "bandwidth_hz", "carrier_hz"):
        if key in doc:
            kwargs[key] = _as_float(doc[key], f"{path}.{key}")
    if "array_elements" in doc:
        kwargs["array_elements"] = _as_int(doc["array_elements"], f"{path}.array_elements")
    return replace(base, **kwargs)


def _channel_from_dict(doc: dict[str, Any], base: ChannelParams) -> ChannelParams:
    if not isinstance(doc, dict):
        raise ConfigError("channel: expected an object")
    _check_keys(doc, _CHANNEL_KEYS, "channel")
    kwargs: dict[str, Any] = {}
    for key in sorted(_CHANNEL_KEYS - {"lte", "mmw", "vn_array_elements",
                                       "shadow_fading_enabled",
                                       "los_probability_override"}):
        if key in doc:
            kwargs[key] = _as_float(doc[key], f"channel.{key}")
    if "vn_array_elements" in doc:
        kwargs["vn_array_elements"] = _as_int(doc["vn_array_elements"], "channel.vn_array_elements")
    if "shadow_fading_enabled" in doc:
        kwargs["shadow_fading_enabled"] = _as_bool(doc["shadow_fading_enabled"], "channel.shadow_fading_enabled")
    if "los_probability_override" in doc and doc["los_probability_override"] is not None:
        kwargs["los_probability_override"] = _as_float(
            doc["los_probability_override"], "channel.los_probability_override")
    if "lte" in doc:
        kwargs["lte"] = _tier_from_dict(doc["lte"], base.lte, "channel.lte")
    if "mmw" in doc:
        kwargs["mmw"] = _tier_from_dict(doc["mmw"], base.mmw, "channel.mmw")
    return replace(base, **kwargs)


def config_from_dict(doc: dict[str, Any]) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a parsed JSON document.

    Absent keys take the defaults of Table-I-style parameters; unknown keys
    are rejected with their dotted path.
    """
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected a JSON object")
    _check_keys(doc, _TOP_KEYS, "")
    base = ScenarioConfig()
    kwargs: dict[str, Any] = {}
    for key in ("area_km2", "lte_density_per_km2", "snr_threshold_db",
                "vns_per_mmw_bs", "no_change_window_multiplier",
                "pick_cap_multiplier"):
        if key in doc:
            kwargs[key] = _as_float(doc[key], key)
    for key in ("fixed_vn_count", "n_sim", "master_seed"):
        if key in doc:
            kwargs[key] = _as_int(doc[key], key)
    if "mmw_density_grid_per_km2" in doc:
        kwargs["mmw_density_grid_per_km2"] = _as_float_list(
            doc["mmw_density_grid_per_km2"], "mmw_density_grid_per_km2")
    if "policies" in doc:
        pol = doc["policies"]
        if not isinstance(pol, (list, tuple)):
            raise ConfigError("policies: expected a list")
        kwargs["policies"] = tuple(str(p) for p in pol)
    if "vn_mode" in doc:
        kwargs["vn_mode"] = str(doc["vn_mode"])
    if "class_requirements_bps" in doc:
        kwargs["class_requirements_bps"] = _as_float_list(
            doc["class_requirements_bps"], "class_requirements_bps", 4)
    if "class_probabilities" in doc:
        kwargs["class_probabilities"] = _as_float_list(
            doc["class_probabilities"], "class_probabilities", 4)
    if "measurement_region_m" in doc and doc["measurement_region_m"] is not None:
        region = _as_float_list(doc["measurement_region_m"], "measurement_region_m", 4)
        kwargs["measurement_region_m"] = region
    if "channel" in doc:
        kwargs["channel"] = _channel_from_dict(doc["channel"], base.channel)
    cfg = replace(base, **kwargs)
    validate_config(cfg)
    return cfg


def validate_config(cfg: ScenarioConfig) -> None:
    """Raise ConfigError naming the offending key on any invariant violation."""
    _require(cfg.area_km2 > 0, "area_km2: must be > 0")
    _require(cfg.lte_density_per_km2 >= 0, "lte_density_per_km2: must be >= 0")
    _require(len(cfg.mmw_density_grid_per_km2) > 0, "mmw_density_grid_per_km2: must be non-empty")
    _require(all(d >= 0 for d in cfg.mmw_density_grid_per_km2),
             "mmw_density_grid_per_km2: densities must be >= 0")
    _require(len(cfg.policies) > 0, "policies: must be non-empty")
    for p in cfg.policies:
        _require(p in POLICY_NAMES, f"policies: unknown policy {p!r}")
    _require(len(set(cfg.policies)) == len(cfg.policies), "policies: duplicate entry")
    _require(cfg.vn_mode in VN_MODES, f"vn_mode: must be one of {VN_MODES}")
    _require(cfg.vns_per_mmw_bs >= 0, "vns_per_mmw_bs: must be >= 0")
    _require(cfg.fixed_vn_count >= 0, "fixed_vn_count: must be >= 0")
    _require(cfg.n_sim >= 1, "n_sim: must be >= 1")
    _require(cfg.master_seed >= 0, "master_seed: must be >= 0")
    _require(all(r >= 0 for r in cfg.class_requirements_bps),
             "class_requirements_bps: rates must be >= 0")
    _require(all(p >= 0 for p in cfg.class_probabilities),
             "class_probabilities: must be >= 0")
    _require(abs(sum(cfg.class_probabilities) - 1.0) <= 1e-9,
             "class_probabilities: must sum to 1 within 1e-9")
    _require(cfg.no_change_window_multiplier > 0, "no_change_window_multiplier: must be > 0")
    _require(cfg.pick_cap_multiplier > 0, "pick_cap_multiplier: must be > 0")
    region = cfg.resolved_measurement_region()
    x_min, x_max, y_min, y_max = region
    side = cfg.area_side_m
    _require(0 <= x_min < x_max <= side and 0 <= y_min < y_max <= side,
             "measurement_region_m: must be a non-empty rectangle inside the area")
    ch = cfg.channel
    _require(ch.lte.bandwidth_hz > 0 and ch.mmw.bandwidth_hz > 0,
             "channel.*.bandwidth_hz: must be > 0")
    _require(ch.lte.carrier_hz > 0 and ch.mmw.carrier_hz > 0,
             "channel.*.carrier_hz: must be > 0")
    _require(ch.lte.array_elements >= 1 and ch.mmw.array_elements >= 1,
             "channel.*.array_elements: must be >= 1")
    _require(ch.vn_array_elements >= 1, "channel.vn_array_elements: must be >= 1")
    _require(ch.min_distance_m > 0, "channel.min_distance_m: must be > 0")
    _require(ch.bs_height_m >= 0 and ch.vn_height_m >= 0,
             "channel.*_height_m: must be >= 0")
    _require(not ch.shadow_fading_enabled,
             "channel.shadow_fading_enabled: shadow fading is reserved, only false is supported")
    if ch.los_probability_override is not None:
        _require(0.0 <= ch.los_probability_override <= 1.0,
                 "channel.los_probability_override: must lie in [0, 1]")


def load_config(source: str | os.PathLike[str] | IO[str]) -> ScenarioConfig:
    """Load a ScenarioConfig from a JSON file path, '-' (stdin) or a stream."""
    if hasattr(source, "read"):
        text = source.read()  # type: ignore[union-attr]
        name = getattr(source, "name", "<stream>")
    elif source == "-":
        import sys

        text = sys.stdin.read()
        name = "<stdin>"
    else:
        try:
            with open(source, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
        name = str(source)
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{name}: invalid JSON: {exc}") from exc
    return config_from_dict(doc)
