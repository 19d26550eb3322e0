"""Long-packet throughput of the fallback and relay options and the throughput-optimal rule."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .blockage import BlockageStats, PeriodSamples, blockage_stats
from .channel import alignment_overhead
from .rates import RateSet, rate_set
from .scenario import ScenarioConfig

Z95 = 1.959963984540054


class AssumptionWarning(UserWarning):
    """The mean slot is not longer than the beam-training overhead."""


class Choice(str, Enum):
    FALLBACK = "fallback"
    RELAY = "relay"
    TIE = "tie"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class DecisionOutcome:
    """Outcome of a relay-vs-fallback comparison.

    ``margin`` is positive when fallback is better: bits/slot for the
    throughput rule, seconds of delay saved for the delay rule.
    """

    choice: Choice
    margin: float
    stats: BlockageStats
    rates: RateSet
    t_a: float


@dataclass(frozen=True)
class ThroughputReport:
    fallback_bits_per_slot: float
    relay_bits_per_slot_approx: float
    mean_slot_s: float
    relay_bits_per_slot_mc: float | None = None
    relay_mc_halfwidth: float | None = None
    assumption1_satisfied: bool = True
    truncated_fraction: float = 0.0

    @property
    def fallback_bps(self) -> float:
        return self.fallback_bits_per_slot / self.mean_slot_s

    @property
    def relay_bps(self) -> float:
        return self.relay_bits_per_slot_approx / self.mean_slot_s


def fallback_throughput(rates: RateSet, stats: BlockageStats) -> float:
    return rates.c_d_mu_x_bps * stats.mean_nonlos_s + rates.c_d_m_y_bps * stats.mean_los_s


def relay_throughput_approx(c_rm: float, stats: BlockageStats, t_a: float) -> float:
    """Mean relay bits per slot assuming every slot outlasts the alignment time."""
    if t_a < 0:
        raise ValueError("t_a must be >= 0")
    if stats.mean_slot_s <= t_a:
        warnings.warn(f"mean slot {stats.mean_slot_s:g} s does not exceed T_a={t_a:g} s", AssumptionWarning)
        return 0.0
    return c_rm * (stats.mean_slot_s - t_a) / 2


def relay_throughput_mc(c_rm: float, samples: PeriodSamples, t_a: float) -> tuple[float, float]:
    """Sample mean of ``c_rm * max((X + Y - T_a)/2, 0)`` and its 95% half-width."""
    slots = samples.slot_s
    if slots.size == 0:
        raise ValueError("samples are empty")
    bits = c_rm * np.maximum((slots - t_a) / 2, 0.0)
    half = Z95 * bits.std(ddof=1) / math.sqrt(bits.size) if bits.size > 1 else math.inf
    return float(bits.mean()), float(half)


def decision_sides(rates: RateSet, stats: BlockageStats, t_a: float) -> tuple[float, float]:
    """Left and right sides of the throughput rule; fallback wins when left > right."""
    half = rates.c_rm_bps / 2
    lhs = half * t_a
    rhs = (half - rates.c_d_mu_x_bps) * stats.mean_nonlos_s + (half - rates.c_d_m_y_bps) * stats.mean_los_s
    return lhs, rhs


def throughput_decision(rates: RateSet, stats: BlockageStats, t_a: float) -> DecisionOutcome:
    lhs, rhs = decision_sides(rates, stats, t_a)
    if lhs > rhs:
        choice = Choice.FALLBACK
    elif lhs < rhs:
        choice = Choice.RELAY
    else:
        choice = Choice.TIE
    return DecisionOutcome(choice, lhs - rhs, stats, rates, t_a)


def crossover_fraction(rates: RateSet, mean_los_s: float, t_a: float) -> float:
    """Blockage fraction at which the throughput rule flips, at fixed mean LoS time.

    Returns ``nan`` when relay never overtakes fallback (relay rate halved
    does not beat the microwave rate).
    """
    half = rates.c_rm_bps / 2
    slope = half - rates.c_d_mu_x_bps
    if slope <= 0:
        return math.nan
    nonlos = (rates.c_d_m_y_bps * mean_los_s - half * (mean_los_s - t_a)) / slope
    if nonlos <= 0:
        return 0.0
    return nonlos / (nonlos + mean_los_s)


def throughput_report(
    cfg: ScenarioConfig, samples: PeriodSamples | None = None, stats: BlockageStats | None = None
) -> tuple[ThroughputReport, DecisionOutcome]:
    """Closed-form (and, given samples, Monte Carlo) throughput for a scenario."""
    stats = stats or blockage_stats(cfg.obstacles)
    rates = rate_set(cfg)
    t_a = alignment_overhead(cfg.antenna)
    relay = relay_throughput_approx(rates.c_rm_bps, stats, t_a)
    extra = {}
    if samples is not None:
        mc, half = relay_throughput_mc(rates.c_rm_bps, samples, t_a)
        slots = samples.slot_s
        extra = dict(
            relay_bits_per_slot_mc=mc,
            relay_mc_halfwidth=half,
            assumption1_satisfied=bool(slots.min() > t_a),
            truncated_fraction=float(np.mean(slots <= t_a)),
        )
    else:
        extra = dict(assumption1_satisfied=stats.mean_slot_s > t_a)
    report = ThroughputReport(
        fallback_bits_per_slot=fallback_throughput(rates, stats),
        relay_bits_per_slot_approx=relay,
        mean_slot_s=stats.mean_slot_s,
        **extra,
    )
    return report, throughput_decision(rates, stats, t_a)
