"""Deterministic link budget: path gain, sector antenna gain, noise and SNR."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .scenario import AntennaPattern, BandParams, ScenarioConfig

THERMAL_NOISE_DBM_PER_HZ = -174.0


class Link(str, Enum):
    SOURCE_DEST = "source-dest"
    SOURCE_RELAY = "source-relay"
    RELAY_DEST = "relay-dest"


@dataclass(frozen=True)
class LinkBudget:
    gain_db: float
    snr_linear: float
    band: str

    @property
    def snr_db(self) -> float:
        return 10 * math.log10(self.snr_linear) if self.snr_linear > 0 else -math.inf


def path_gain_db(band: BandParams, distance_m: float, n_obstacles: int = 0, obstacle_loss_db: float = 0.0) -> float:
    """Channel gain in dB at ``distance_m`` (>= 1 m reference distance).

    Atmospheric absorption is ``atmo_db_per_km * distance_km``.  Passing
    ``obstacle_loss_db=math.inf`` with at least one obstacle returns ``-inf``.
    """
    if distance_m < 1.0:
        raise ValueError(f"distance_m={distance_m} is below the 1 m reference distance")
    if n_obstacles < 0:
        raise ValueError("n_obstacles must be >= 0")
    gain = -band.ref_attenuation_db - 20 * math.log10(distance_m) - band.atmo_db_per_km * distance_m / 1000.0
    if n_obstacles:
        gain -= n_obstacles * obstacle_loss_db
    return gain


def mainlobe_gain(pattern: AntennaPattern) -> float:
    theta = pattern.theta_rad
    return (2 * math.pi - pattern.epsilon * (2 * math.pi - theta)) / theta


def alignment_overhead(pattern: AntennaPattern) -> float:
    """Beam-training time: one pilot per (sector beam, sector beam) pair at beam level."""
    ratio = pattern.phi_rad / pattern.theta_rad
    # Guard against 90/20-style ratios landing a hair above an integer after the radian round trip.
    nearest = round(ratio)
    beams = nearest if math.isclose(ratio, nearest, rel_tol=1e-12) else math.ceil(ratio)
    return beams * beams * pattern.pilot_time_s


def noise_power_dbm(bandwidth_hz: float) -> float:
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth_hz must be > 0")
    return THERMAL_NOISE_DBM_PER_HZ + 10 * math.log10(bandwidth_hz)


def dbm_to_mw(dbm: float) -> float:
    return 10 ** (dbm / 10)


def _distance(cfg: ScenarioConfig, link: Link) -> float:
    geo = cfg.geometry
    return {Link.SOURCE_DEST: geo.d_sd_m, Link.SOURCE_RELAY: geo.d_sr_m, Link.RELAY_DEST: geo.d_rd_m}[Link(link)]


def link_snr(cfg: ScenarioConfig, link: Link | str, band: str, n_obstacles: int = 0) -> LinkBudget:
    """SNR of one hop.

    Microwave is omnidirectional (antenna gain 1).  mmWave uses the sector
    main-lobe gain, squared when ``cfg.gain_both_ends`` is set, and any
    obstacle on a mmWave hop drives the SNR to zero.
    """
    params = {"microwave": cfg.microwave, "mmwave": cfg.mmwave}[band]
    loss = math.inf if band == "mmwave" else params.obstacle_loss_db
    gain_db = path_gain_db(params, _distance(cfg, link), n_obstacles, loss)
    antenna = 1.0
    if band == "mmwave":
        antenna = mainlobe_gain(cfg.antenna)
        if cfg.gain_both_ends:
            antenna *= antenna
    noise_mw = dbm_to_mw(noise_power_dbm(params.bandwidth_hz))
    snr = cfg.tx_power_mw / noise_mw * 10 ** (gain_db / 10) * antenna
    return LinkBudget(gain_db=gain_db, snr_linear=snr, band=band)
