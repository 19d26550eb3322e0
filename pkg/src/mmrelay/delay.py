"""Short-packet delay analysis: M|D|1 service rates, delays and delay-optimal regions.

A bit is the M|D|1 customer, so delays are per bit.  A diverged (unstable)
queue is reported as ``math.inf``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Sequence

from .analysis import Choice, DecisionOutcome
from .blockage import BlockageStats, blockage_stats, nu_for_fraction
from .channel import alignment_overhead
from .rates import RateSet, rate_set
from .scenario import ScenarioConfig


@dataclass(frozen=True)
class DelayReport:
    offered_load_bps: float
    service_rate_fallback_bps: float
    service_rate_relay_bps: float
    delay_fallback_s: float
    delay_relay_s: float

    @property
    def utilization_fallback(self) -> float:
        return _utilization(self.offered_load_bps, self.service_rate_fallback_bps)

    @property
    def utilization_relay(self) -> float:
        return _utilization(self.offered_load_bps, self.service_rate_relay_bps)

    @property
    def throughput_fallback_bps(self) -> float:
        return min(self.offered_load_bps, self.service_rate_fallback_bps)

    @property
    def throughput_relay_bps(self) -> float:
        return min(self.offered_load_bps, self.service_rate_relay_bps)


def _utilization(load: float, service: float) -> float:
    return load / service if service > 0 else math.inf


def fallback_service_rate(rates: RateSet, stats: BlockageStats) -> float:
    f = stats.blockage_fraction
    return rates.c_d_mu_x_bps * f + rates.c_d_m_y_bps * (1 - f)


def relay_service_rate(c_rm: float, stats: BlockageStats, t_a: float, paper_literal: bool = False) -> float:
    """Relay bit service rate.

    By default each slot loses ``t_a`` to beam training before the two hops
    split what is left; ``paper_literal`` drops that haircut (rate ``c_rm/2``).
    """
    if paper_literal:
        return c_rm * stats.mean_slot_s / (2 * stats.mean_slot_s)
    return c_rm * max(stats.mean_slot_s - t_a, 0.0) / (2 * stats.mean_slot_s)


def md1_delay(offered_load_bps: float, service_rate_bps: float) -> float:
    """Mean M|D|1 sojourn time, or ``inf`` once utilization reaches 1."""
    if offered_load_bps < 0:
        raise ValueError("offered_load_bps must be >= 0")
    if service_rate_bps <= 0:
        return math.inf
    rho = offered_load_bps / service_rate_bps
    if rho >= 1:
        return math.inf
    return (2 - rho) / (2 * service_rate_bps * (1 - rho))


def _delay_choice(delay_fb: float, delay_rl: float) -> Choice:
    if math.isinf(delay_fb) and math.isinf(delay_rl):
        return Choice.INFEASIBLE
    if delay_fb < delay_rl:
        return Choice.FALLBACK
    if delay_rl < delay_fb:
        return Choice.RELAY
    return Choice.TIE


def delay_decision(
    cfg: ScenarioConfig, offered_load_bps: float | None = None, stats: BlockageStats | None = None
) -> tuple[DelayReport, DecisionOutcome]:
    """Pick the option with lower mean delay at the offered load.

    Rates are always the finite-blocklength ones here, whatever
    ``cfg.traffic.long_packet_mode`` says.  ``stats`` overrides the
    obstacle-process statistics (e.g. a fixed mean slot length).
    """
    load = cfg.traffic.offered_load_bps if offered_load_bps is None else offered_load_bps
    stats = stats or blockage_stats(cfg.obstacles)
    rates = rate_set(cfg, long_packet=False)
    t_a = alignment_overhead(cfg.antenna)
    s_fb = fallback_service_rate(rates, stats)
    s_rl = relay_service_rate(rates.c_rm_bps, stats, t_a, cfg.eq15_paper_literal)
    report = DelayReport(load, s_fb, s_rl, md1_delay(load, s_fb), md1_delay(load, s_rl))
    choice = _delay_choice(report.delay_fallback_s, report.delay_relay_s)
    margin = math.nan if choice is Choice.INFEASIBLE else report.delay_relay_s - report.delay_fallback_s
    return report, DecisionOutcome(choice, margin, stats, rates, t_a)


class CellLabel(str, Enum):
    FALLBACK = "fallback"  # only fallback is stable
    RELAY = "relay"  # only relay is stable
    BOTH_FALLBACK_FASTER = "both-feasible-fallback-faster"
    BOTH_RELAY_FASTER = "both-feasible-relay-faster"
    BOTH_TIE = "both-feasible-tie"
    INFEASIBLE = "infeasible"

    @property
    def relay_side(self) -> bool:
        return self in (CellLabel.RELAY, CellLabel.BOTH_RELAY_FASTER)


def _label(report: DelayReport) -> CellLabel:
    fb_ok = math.isfinite(report.delay_fallback_s)
    rl_ok = math.isfinite(report.delay_relay_s)
    if fb_ok and rl_ok:
        if report.delay_fallback_s < report.delay_relay_s:
            return CellLabel.BOTH_FALLBACK_FASTER
        if report.delay_relay_s < report.delay_fallback_s:
            return CellLabel.BOTH_RELAY_FASTER
        return CellLabel.BOTH_TIE
    if fb_ok:
        return CellLabel.FALLBACK
    if rl_ok:
        return CellLabel.RELAY
    return CellLabel.INFEASIBLE


@dataclass(frozen=True)
class RegionCell:
    theta_deg: float
    blockage_fraction: float
    label: CellLabel
    report: DelayReport


@dataclass(frozen=True)
class RegionGrid:
    theta_axis: tuple[float, ...]
    blockage_axis: tuple[float, ...]
    cells: tuple[tuple[RegionCell, ...], ...]  # cells[i][j]: theta_axis[i], blockage_axis[j]

    def column(self, theta_deg: float) -> tuple[RegionCell, ...]:
        return self.cells[self.theta_axis.index(theta_deg)]

    def relay_onset(self, theta_deg: float) -> float:
        """Smallest blockage fraction on the axis where relay is the delay-optimal choice."""
        for cell in self.column(theta_deg):
            if cell.label.relay_side:
                return cell.blockage_fraction
        return math.nan


class RegionError(ValueError):
    pass


def decision_region(
    cfg: ScenarioConfig,
    theta_values: Sequence[float],
    blockage_values: Sequence[float],
    target_rate_bps: float,
    mean_slot_s: float | None = None,
) -> RegionGrid:
    """Delay-optimal option over a (beamwidth in degrees, blockage fraction) grid.

    Each blockage fraction is realized by solving for the obstacle departure
    rate at the scenario's arrival rate, unless ``mean_slot_s`` fixes the
    mean slot length directly.
    """
    if not theta_values or not blockage_values:
        raise RegionError("theta and blockage axes must be non-empty")
    rows = []
    for theta in theta_values:
        try:
            antenna = replace(cfg.antenna, theta_rad=math.radians(theta))
        except ValueError as exc:
            raise RegionError(f"theta={theta} deg: {exc}") from None
        row = []
        for fraction in blockage_values:
            try:
                if mean_slot_s is None:
                    nu = nu_for_fraction(fraction, cfg.obstacles.lambda_per_s)
                    cell_cfg = replace(cfg, antenna=antenna, obstacles=replace(cfg.obstacles, nu_per_s=nu))
                    stats = None
                else:
                    cell_cfg = replace(cfg, antenna=antenna)
                    stats = BlockageStats.from_fraction(fraction, mean_slot_s)
            except ValueError as exc:
                raise RegionError(f"cell (theta={theta} deg, blockage={fraction}): {exc}") from None
            report, _ = delay_decision(cell_cfg, target_rate_bps, stats)
            row.append(RegionCell(float(theta), float(fraction), _label(report), report))
        rows.append(tuple(row))
    return RegionGrid(tuple(map(float, theta_values)), tuple(map(float, blockage_values)), tuple(rows))


REGION_COLUMNS = (
    "theta_deg", "blockage_fraction", "choice", "delay_fallback_s", "delay_relay_s",
    "service_rate_fallback_bps", "service_rate_relay_bps",
)


def fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_region_csv(grid: RegionGrid, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REGION_COLUMNS)
        for row in grid.cells:
            for cell in row:
                r = cell.report
                writer.writerow([
                    fmt(cell.theta_deg), fmt(cell.blockage_fraction), cell.label.value,
                    fmt(r.delay_fallback_s), fmt(r.delay_relay_s),
                    fmt(r.service_rate_fallback_bps), fmt(r.service_rate_relay_bps),
                ])
