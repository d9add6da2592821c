"""Link-level channel model: LOS probabilities, path loss, antenna gain,
SNR and the load-dependent Shannon rate, assembled per snapshot into an
immutable link table."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ChannelParams
from .geometry import Snapshot, Tier

DEFAULT_SNR_THRESHOLD_DB = -5.0


def los_probability_lte(d_km):
    """Outdoor macro LOS probability as a function of 2D distance in km.

    p = min(0.018/d, 1) * (1 - exp(-d/0.063)) + exp(-d/0.063), with p(0) = 1.
    Accepts scalars or arrays.
    """
    d = np.asarray(d_km, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be >= 0")
    with np.errstate(divide="ignore"):
        ratio = np.minimum(np.divide(0.018, d, out=np.full_like(d, np.inf),
                                     where=d > 0), 1.0)
    decay = np.exp(-d / 0.063)
    p = ratio * (1.0 - decay) + decay
    p = np.clip(np.where(d == 0, 1.0, p), 0.0, 1.0)
    return float(p) if p.ndim == 0 else p


def los_probability_mmw(d_2d_m):
    """Street-canyon LOS probability as a function of 2D distance in meters.

    p = 1 for d <= 18 m, else 18/d + exp(-d/36) * (1 - 18/d).
    Accepts scalars or arrays.
    """
    d = np.asarray(d_2d_m, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be >= 0")
    with np.errstate(divide="ignore"):
        near = np.divide(18.0, d, out=np.ones_like(d), where=d > 0)
    p = near + np.exp(-d / 36.0) * (1.0 - near)
    p = np.clip(np.where(d <= 18.0, 1.0, p), 0.0, 1.0)
    return float(p) if p.ndim == 0 else p


def path_loss(tier: Tier, los, d_3d_m, carrier_hz: float,
              params: ChannelParams | None = None):
    """Log-distance path loss in dB for one tier and LOS state.

    Distances below params.min_distance_m are clamped. The NLOS value is
    floored at the LOS value so the NLOS >= LOS ordering holds at every
    distance. Accepts scalar or array `los`/`d_3d_m`.
    """
    p = params or ChannelParams()
    d = np.maximum(np.asarray(d_3d_m, dtype=float), p.min_distance_m)
    los_arr = np.asarray(los, dtype=bool)
    if tier is Tier.LTE:
        d_km = d / 1000.0
        pl_los = p.lte_pl_los_intercept_db + p.lte_pl_los_distance_slope_db * np.log10(d_km)
        pl_nlos = p.lte_pl_nlos_intercept_db + p.lte_pl_nlos_distance_slope_db * np.log10(d_km)
    else:
        f_ghz = carrier_hz / 1e9
        pl_los = (p.mmw_pl_los_intercept_db
                  + p.mmw_pl_los_distance_slope_db * np.log10(d)
                  + p.mmw_pl_los_frequency_slope_db * math.log10(f_ghz))
        pl_nlos = (p.mmw_pl_nlos_intercept_db
                   + p.mmw_pl_nlos_distance_slope_db * np.log10(d)
                   + p.mmw_pl_nlos_frequency_slope_db * math.log10(f_ghz)
                   - p.mmw_pl_nlos_height_slope_db * (p.vn_height_m - 1.5))
    pl = np.where(los_arr, pl_los, np.maximum(pl_los, pl_nlos))
    return float(pl) if pl.ndim == 0 else pl


def cumulative_gain(tier: Tier, bs_elements: int, vn_elements: int) -> float:
    """Linear antenna gain of one link: 1 for omnidirectional LTE, the
    product of the array element counts for beamformed mmWave."""
    if bs_elements < 1 or vn_elements < 1:
        raise ValueError("element counts must be >= 1")
    if tier is Tier.LTE:
        return 1.0
    return float(bs_elements * vn_elements)


def snr_db(tx_power_dbm, gain_linear, path_loss_db, bandwidth_hz,
           noise_psd_dbm_per_hz: float = -174.0):
    """Downlink SNR in dB: tx + gain - path loss - thermal noise over the band."""
    bw = np.asarray(bandwidth_hz, dtype=float)
    if np.any(bw <= 0):
        raise ValueError("bandwidth must be > 0")
    noise_dbm = noise_psd_dbm_per_hz + 10.0 * np.log10(bw)
    out = (np.asarray(tx_power_dbm, dtype=float)
           + 10.0 * np.log10(np.asarray(gain_linear, dtype=float))
           - np.asarray(path_loss_db, dtype=float) - noise_dbm)
    return float(out) if out.ndim == 0 else out


def achievable_rate(snr_value_db: float, bandwidth_hz: float, load_m: int,
                    snr_threshold_db: float = DEFAULT_SNR_THRESHOLD_DB) -> float:
    """Shannon rate of one vehicle on a cell shared by load_m vehicles.

    Zero below the outage threshold; otherwise (B/m) * log2(1 + snr_linear).
    """
    if load_m < 1:
        raise ValueError("load_m must be >= 1")
    if snr_value_db < snr_threshold_db:
        return 0.0
    snr_linear = 10.0 ** (snr_value_db / 10.0)
    return (bandwidth_hz / load_m) * math.log2(1.0 + snr_linear)


@dataclass(frozen=True)
class LinkState:
    """Realized channel of one (vehicle, base station) pair."""

    vn_id: int
    bs_id: int
    los: bool
    path_loss_db: float
    gain: float
    snr_db: float
    in_outage: bool


class LinkTable:
    """Per-snapshot matrix of realized links, frozen after construction.

    Rows are vehicles, columns base stations. unit_rate_bps holds the
    achievable rate at load 1, so the rate at load m is unit_rate_bps / m.
    """

    def __init__(self, snr: np.ndarray, bandwidth_hz: np.ndarray,
                 is_lte: np.ndarray, required_rate_bps: np.ndarray,
                 snr_threshold_db: float = DEFAULT_SNR_THRESHOLD_DB,
                 los: np.ndarray | None = None,
                 path_loss_db: np.ndarray | None = None,
                 gain: np.ndarray | None = None):
        snr = np.asarray(snr, dtype=float)
        n_vn, n_bs = snr.shape
        self.n_vn = n_vn
        self.n_bs = n_bs
        self.snr_db = snr
        self.bandwidth_hz = np.asarray(bandwidth_hz, dtype=float)
        self.is_lte = np.asarray(is_lte, dtype=bool)
        self.required_rate_bps = np.asarray(required_rate_bps, dtype=float)
        self.snr_threshold_db = float(snr_threshold_db)
        self.los = los if los is not None else np.ones_like(snr, dtype=bool)
        self.path_loss_db = (path_loss_db if path_loss_db is not None
                             else np.zeros_like(snr))
        self.gain = gain if gain is not None else np.ones_like(snr)
        self.in_outage = snr < self.snr_threshold_db
        with np.errstate(over="ignore"):
            unit = self.bandwidth_hz[None, :] * np.log2(1.0 + 10.0 ** (snr / 10.0))
        self.unit_rate_bps = np.where(self.in_outage, 0.0, unit)
        self.lte_indices = np.flatnonzero(self.is_lte)
        for arr in (self.snr_db, self.bandwidth_hz, self.is_lte,
                    self.required_rate_bps, self.los, self.path_loss_db,
                    self.gain, self.in_outage, self.unit_rate_bps,
                    self.lte_indices):
            arr.setflags(write=False)

    def link(self, vn_id: int, bs_id: int) -> LinkState:
        return LinkState(
            vn_id=vn_id,
            bs_id=bs_id,
            los=bool(self.los[vn_id, bs_id]),
            path_loss_db=float(self.path_loss_db[vn_id, bs_id]),
            gain=float(self.gain[vn_id, bs_id]),
            snr_db=float(self.snr_db[vn_id, bs_id]),
            in_outage=bool(self.in_outage[vn_id, bs_id]),
        )

    def rate_bps(self, vn_id: int, bs_id: int, load_m: int) -> float:
        if load_m < 1:
            raise ValueError("load_m must be >= 1")
        return float(self.unit_rate_bps[vn_id, bs_id]) / load_m


def build_link_table(snapshot: Snapshot, rng: np.random.Generator,
                     params: ChannelParams | None = None,
                     snr_threshold_db: float = DEFAULT_SNR_THRESHOLD_DB) -> LinkTable:
    """Realize every (vehicle, base station) link of one snapshot.

    LOS states are Bernoulli draws against the tier's distance-dependent
    probability, taken once here and never resampled.
    """
    p = params or ChannelParams()
    n_vn = len(snapshot.vehicles)
    n_bs = len(snapshot.base_stations)
    vx = np.array([v.pos.x for v in snapshot.vehicles], dtype=float)
    vy = np.array([v.pos.y for v in snapshot.vehicles], dtype=float)
    vz = np.array([v.pos.z for v in snapshot.vehicles], dtype=float)
    ve = np.array([v.array_elements for v in snapshot.vehicles], dtype=float)
    req = np.array([v.required_rate_bps for v in snapshot.vehicles], dtype=float)
    bx = np.array([b.pos.x for b in snapshot.base_stations], dtype=float)
    by = np.array([b.pos.y for b in snapshot.base_stations], dtype=float)
    bz = np.array([b.pos.z for b in snapshot.base_stations], dtype=float)
    be = np.array([b.array_elements for b in snapshot.base_stations], dtype=float)
    btx = np.array([b.tx_power_dbm for b in snapshot.base_stations], dtype=float)
    bbw = np.array([b.bandwidth_hz for b in snapshot.base_stations], dtype=float)
    is_lte = np.array([b.tier is Tier.LTE for b in snapshot.base_stations], dtype=bool)

    d2d = np.hypot(vx[:, None] - bx[None, :], vy[:, None] - by[None, :])
    d3d = np.maximum(np.hypot(d2d, vz[:, None] - bz[None, :]), p.min_distance_m)

    p_los = np.empty((n_vn, n_bs), dtype=float)
    if n_vn and n_bs:
        p_los[:, is_lte] = los_probability_lte(d2d[:, is_lte] / 1000.0)
        p_los[:, ~is_lte] = los_probability_mmw(d2d[:, ~is_lte])
    if p.los_probability_override is not None:
        p_los.fill(p.los_probability_override)
    los = rng.random(size=(n_vn, n_bs)) < p_los

    pl = np.empty((n_vn, n_bs), dtype=float)
    gain = np.empty((n_vn, n_bs), dtype=float)
    for tier, mask in ((Tier.LTE, is_lte), (Tier.MMWAVE, ~is_lte)):
        if not mask.any() or n_vn == 0:
            continue
        carriers = {snapshot.base_stations[j].carrier_hz
                    for j in np.flatnonzero(mask)}
        for carrier in carriers:
            cols = mask & np.array([b.carrier_hz == carrier
                                    for b in snapshot.base_stations])
            pl[:, cols] = path_loss(tier, los[:, cols], d3d[:, cols], carrier, p)
        if tier is Tier.LTE:
            gain[:, mask] = 1.0
        else:
            gain[:, mask] = ve[:, None] * be[None, mask]

    snr = snr_db(btx[None, :], gain, pl, bbw[None, :], p.noise_psd_dbm_per_hz) \
        if n_vn and n_bs else np.zeros((n_vn, n_bs))
    return LinkTable(snr, bbw, is_lte, req, snr_threshold_db,
                     los=los, path_loss_db=pl, gain=gain)
