"""Network snapshot generation: PPP base stations, uniform vehicles,
traffic classes and the boundary-effect measurement region."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import ChannelParams, ScenarioConfig, TierRadio


class Tier(Enum):
    LTE = "LTE"
    MMWAVE = "MMWAVE"


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class BaseStation:
    id: int
    tier: Tier
    pos: Position
    tx_power_dbm: float
    bandwidth_hz: float
    carrier_hz: float
    array_elements: int


@dataclass(frozen=True)
class VehicularNode:
    id: int
    pos: Position
    class_k: int
    required_rate_bps: float
    array_elements: int


@dataclass(frozen=True)
class Snapshot:
    base_stations: list[BaseStation]
    vehicles: list[VehicularNode]
    # x_min, x_max, y_min, y_max in meters, closed boundary
    measurement_region_m: tuple[float, float, float, float]


def _tier_stations(tier: Tier, radio: TierRadio, density_per_km2: float,
                   area_km2: float, height_m: float, id_offset: int,
                   rng: np.random.Generator) -> list[BaseStation]:
    count = int(rng.poisson(density_per_km2 * area_km2))
    side = math.sqrt(area_km2) * 1000.0
    xy = rng.uniform(0.0, side, size=(count, 2))
    return [
        BaseStation(
            id=id_offset + i,
            tier=tier,
            pos=Position(float(xy[i, 0]), float(xy[i, 1]), height_m),
            tx_power_dbm=radio.tx_power_dbm,
            bandwidth_hz=radio.bandwidth_hz,
            carrier_hz=radio.carrier_hz,
            array_elements=radio.array_elements,
        )
        for i in range(count)
    ]


def deploy_base_stations(density_lte_per_km2: float, density_mmw_per_km2: float,
                         area_km2: float, rng: np.random.Generator,
                         channel: ChannelParams | None = None) -> list[BaseStation]:
    """Draw both tiers as independent PPPs over the square area.

    LTE stations get the lower ids. Empty tiers are valid outcomes and are
    kept (not redrawn).
    """
    if density_lte_per_km2 < 0 or density_mmw_per_km2 < 0:
        raise ValueError("base-station densities must be >= 0")
    if area_km2 <= 0:
        raise ValueError("area_km2 must be > 0")
    ch = channel or ChannelParams()
    lte = _tier_stations(Tier.LTE, ch.lte, density_lte_per_km2, area_km2,
                         ch.bs_height_m, 0, rng)
    mmw = _tier_stations(Tier.MMWAVE, ch.mmw, density_mmw_per_km2, area_km2,
                         ch.bs_height_m, len(lte), rng)
    return lte + mmw


def deploy_vehicles(mode: str, mean_mmw_bs: float, area_km2: float,
                    rng: np.random.Generator, *,
                    vns_per_mmw_bs: float = 10.0,
                    fixed_vn_count: int = 500,
                    class_probabilities: tuple[float, ...] = (0.25, 0.25, 0.25, 0.25),
                    class_requirements_bps: tuple[float, ...] = (1e6, 10e6, 100e6, 1200e6),
                    array_elements: int = 16,
                    height_m: float = 2.0) -> list[VehicularNode]:
    """Place vehicles uniformly and draw their traffic classes.

    PER_MMW_BS mode draws the vehicle count as Poisson(vns_per_mmw_bs *
    mean_mmw_bs), i.e. against the mmWave tier's expected station count so
    the two point processes stay independent; FIXED places exactly
    fixed_vn_count.
    """
    if mean_mmw_bs < 0:
        raise ValueError("mean_mmw_bs must be >= 0")
    if mode == "PER_MMW_BS":
        count = int(rng.poisson(vns_per_mmw_bs * mean_mmw_bs))
    elif mode == "FIXED":
        count = fixed_vn_count
    else:
        raise ValueError(f"unknown vn deployment mode {mode!r}")
    side = math.sqrt(area_km2) * 1000.0
    xy = rng.uniform(0.0, side, size=(count, 2))
    classes = rng.choice(4, size=count, p=list(class_probabilities)) + 1
    return [
        VehicularNode(
            id=i,
            pos=Position(float(xy[i, 0]), float(xy[i, 1]), height_m),
            class_k=int(classes[i]),
            required_rate_bps=float(class_requirements_bps[classes[i] - 1]),
            array_elements=array_elements,
        )
        for i in range(count)
    ]


def in_measurement_region(pos: Position, snapshot: Snapshot) -> bool:
    """True iff (x, y) lies in the central statistics square (closed boundary)."""
    x_min, x_max, y_min, y_max = snapshot.measurement_region_m
    return x_min <= pos.x <= x_max and y_min <= pos.y <= y_max


def build_snapshot(config: ScenarioConfig, lambda_m: float,
                   rng: np.random.Generator) -> Snapshot:
    """One network realization: base stations first, then vehicles."""
    stations = deploy_base_stations(
        config.lte_density_per_km2, lambda_m, config.area_km2, rng,
        config.channel)
    vehicles = deploy_vehicles(
        config.vn_mode, lambda_m * config.area_km2, config.area_km2, rng,
        vns_per_mmw_bs=config.vns_per_mmw_bs,
        fixed_vn_count=config.fixed_vn_count,
        class_probabilities=config.class_probabilities,
        class_requirements_bps=config.class_requirements_bps,
        array_elements=config.channel.vn_array_elements,
        height_m=config.channel.vn_height_m)
    return Snapshot(stations, vehicles, config.resolved_measurement_region())
