"""Achievable link rates: Shannon capacity and the normal-approximation short-packet rate."""
from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

from .channel import Link, link_snr
from .scenario import ScenarioConfig, TrafficParams

LOG2E = math.log2(math.e)
_STD_NORMAL = NormalDist()


@dataclass(frozen=True)
class RateSet:
    c_d_mu_x_bps: float
    c_d_m_y_bps: float
    c_rm_bps: float
    regime: str  # "long-packet" | "short-packet"


def shannon_rate(bandwidth_hz: float, snr_linear: float) -> float:
    if snr_linear < 0:
        raise ValueError("snr_linear must be >= 0")
    return bandwidth_hz * math.log2(1 + snr_linear)


def q_inverse(p: float) -> float:
    """Inverse of the standard Gaussian tail ``Q(x) = P(N(0,1) > x)``."""
    if not 0 < p < 1:
        raise ValueError(f"p={p} outside (0, 1)")
    return -_STD_NORMAL.inv_cdf(p)


def channel_dispersion(snr_linear: float) -> float:
    # Single log2(e) factor, kept as the model states it (not the squared form).
    s = snr_linear
    return s / 2 * (s + 2) / (s + 1) ** 2 * LOG2E


def _spectral_efficiency(snr: float, traffic: TrafficParams | None, paper_literal: bool) -> float:
    if snr == 0:
        return 0.0
    capacity = math.log2(1 + snr)
    if traffic is None or traffic.long_packet_mode:
        return capacity
    L = traffic.packet_bits
    penalty = math.sqrt(channel_dispersion(snr) / L) * q_inverse(traffic.packet_error_prob)
    bonus = math.log2(L) if paper_literal else math.log2(L) / (2 * L)
    return max(capacity - penalty + bonus, 0.0)


def finite_blocklength_rate(
    bandwidth_hz: float, snr_linear: float, L: int, P_b: float, paper_literal: bool = False
) -> float:
    """Short-packet achievable rate in bits/s, clamped at zero.

    ``paper_literal`` swaps the ``log2(L)/(2L)`` correction for ``log2(L)``,
    which exceeds capacity for every ``L >= 2``.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if snr_linear < 0:
        raise ValueError("snr_linear must be >= 0")
    traffic = TrafficParams(packet_bits=int(L), packet_error_prob=P_b, long_packet_mode=False)
    return bandwidth_hz * _spectral_efficiency(snr_linear, traffic, paper_literal)


def relay_rate(
    bandwidth_hz: float, snr_sr: float, snr_rd: float, traffic: TrafficParams | None = None,
    paper_literal: bool = False,
) -> float:
    """Two-hop rate with equal hop durations: the weaker hop sets the pace.

    Uses Shannon efficiency unless ``traffic`` selects the short-packet regime.
    """
    if snr_sr < 0 or snr_rd < 0:
        raise ValueError("SNRs must be >= 0")
    return bandwidth_hz * min(
        _spectral_efficiency(snr_sr, traffic, paper_literal),
        _spectral_efficiency(snr_rd, traffic, paper_literal),
    )


def rate_set(cfg: ScenarioConfig, long_packet: bool | None = None) -> RateSet:
    """Direct microwave, direct mmWave (LoS) and two-hop mmWave rates.

    ``long_packet`` overrides ``cfg.traffic.long_packet_mode`` when given.
    The microwave rate is the one seen during a non-LoS period, i.e. with
    one obstacle on the direct path.
    """
    traffic = cfg.traffic
    if long_packet is not None and long_packet != traffic.long_packet_mode:
        traffic = TrafficParams(traffic.offered_load_bps, traffic.packet_bits, traffic.packet_error_prob, long_packet)
    literal = cfg.eq12_paper_literal

    snr_mu = link_snr(cfg, Link.SOURCE_DEST, "microwave", n_obstacles=1).snr_linear
    snr_m = link_snr(cfg, Link.SOURCE_DEST, "mmwave").snr_linear
    snr_sr = link_snr(cfg, Link.SOURCE_RELAY, "mmwave").snr_linear
    snr_rd = link_snr(cfg, Link.RELAY_DEST, "mmwave").snr_linear

    return RateSet(
        c_d_mu_x_bps=cfg.microwave.bandwidth_hz * _spectral_efficiency(snr_mu, traffic, literal),
        c_d_m_y_bps=cfg.mmwave.bandwidth_hz * _spectral_efficiency(snr_m, traffic, literal),
        c_rm_bps=relay_rate(cfg.mmwave.bandwidth_hz, snr_sr, snr_rd, traffic, literal),
        regime="long-packet" if traffic.long_packet_mode else "short-packet",
    )
