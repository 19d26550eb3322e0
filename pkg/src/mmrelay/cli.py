"""Command-line front end.

Subcommands ``run``, ``sweep-blockage``, ``region`` and ``validate`` each
write CSV files plus a ``manifest.json`` into ``--out``.  Exit status is 0 on
success, 1 when a validation check fails and 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .analysis import relay_throughput_mc, throughput_report
from .blockage import blockage_stats, simulate_periods
from .channel import alignment_overhead
from .delay import decision_region, delay_decision, fmt, write_region_csv
from .rates import rate_set
from .scenario import ScenarioConfig, ScenarioError, load_scenario, scenario_to_dict

# Relative tolerances for analytic-vs-simulated comparisons; each is widened
# to 1.5x the 95% half-width when the sample is too small to resolve it.
VALIDATE_TOLERANCES = {
    "mean_nonlos_s": 0.02,
    "mean_los_s": 0.02,
    "blockage_fraction": 0.02,
    "mean_occupancy": 0.02,
    "relay_bits_per_slot": 0.005,
}
MIN_VALIDATE_SLOTS = 1000


class UsageError(Exception):
    pass


def _parse_range(text: str) -> np.ndarray:
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise UsageError(f"--nu-range expects min:max:steps, got {text!r}") from None
    if steps < 1 or lo <= 0 or hi < lo or (steps == 1 and hi != lo):
        raise UsageError(f"invalid --nu-range {text!r}")
    return np.linspace(lo, hi, steps)


def _parse_list(text: str, name: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{name} expects comma-separated numbers, got {text!r}") from None
    if not values:
        raise UsageError(f"{name} is empty")
    return values


def _load(args) -> ScenarioConfig:
    cfg = load_scenario(args.scenario) if args.scenario else ScenarioConfig()
    overrides = {}
    if args.paper_literal_eq12:
        overrides["eq12_paper_literal"] = True
    if args.paper_literal_eq15:
        overrides["eq15_paper_literal"] = True
    if args.gain_both_ends:
        overrides["gain_both_ends"] = True
    return replace(cfg, **overrides) if overrides else cfg


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def _write_manifest(out: Path, args, cfg: ScenarioConfig, outputs: list[Path], seed=None) -> Path:
    path = out / "manifest.json"
    manifest = {
        "command": args.command,
        "scenario_path": str(args.scenario) if args.scenario else None,
        "seed": seed,
        "output_paths": [str(p) for p in outputs],
        "tool_version": __version__,
        "kernel_backend": kernels.BACKEND,
        "config_echo": scenario_to_dict(cfg),
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def cmd_run(args, cfg: ScenarioConfig, out: Path) -> int:
    report, decision = throughput_report(cfg)
    rates = rate_set(cfg)
    stats = blockage_stats(cfg.obstacles)
    throughput_csv = out / "throughput.csv"
    _write_csv(throughput_csv, [
        "theta_deg", "blockage_fraction", "mean_nonlos_s", "mean_los_s", "alignment_overhead_s",
        "c_d_mu_x_bps", "c_d_m_y_bps", "c_rm_bps", "fallback_bits_per_slot", "relay_bits_per_slot",
        "fallback_bps", "relay_bps", "margin_bits_per_slot", "decision",
    ], [[
        math.degrees(cfg.antenna.theta_rad), stats.blockage_fraction, stats.mean_nonlos_s, stats.mean_los_s,
        decision.t_a, rates.c_d_mu_x_bps, rates.c_d_m_y_bps, rates.c_rm_bps,
        report.fallback_bits_per_slot, report.relay_bits_per_slot_approx,
        report.fallback_bps, report.relay_bps, decision.margin, decision.choice.value,
    ]])
    delay, ddecision = delay_decision(cfg)
    delay_csv = out / "delay.csv"
    _write_csv(delay_csv, [
        "offered_load_bps", "service_rate_fallback_bps", "service_rate_relay_bps",
        "utilization_fallback", "utilization_relay", "delay_fallback_s", "delay_relay_s", "decision",
    ], [[
        delay.offered_load_bps, delay.service_rate_fallback_bps, delay.service_rate_relay_bps,
        delay.utilization_fallback, delay.utilization_relay, delay.delay_fallback_s, delay.delay_relay_s,
        ddecision.choice.value,
    ]])
    _write_manifest(out, args, cfg, [throughput_csv, delay_csv])
    print(f"throughput decision: {decision.choice.value}; delay decision: {ddecision.choice.value}")
    return 0


def sweep_rows(cfg: ScenarioConfig, nus, slots: int | None = None, seed: int = 0):
    """Fallback/relay throughput per departure rate; Monte Carlo columns when ``slots`` is set."""
    rates = rate_set(cfg)
    t_a = alignment_overhead(cfg.antenna)
    rows = []
    for i, nu in enumerate(nus):
        proc = replace(cfg.obstacles, nu_per_s=float(nu))
        point = replace(cfg, obstacles=proc)
        report, decision = throughput_report(point)
        mc, half = "", ""
        if slots:
            samples = simulate_periods(proc, slots, seed=(seed, i))
            mc, half = relay_throughput_mc(rates.c_rm_bps, samples, t_a)
        rows.append([
            float(nu), blockage_stats(proc).blockage_fraction, report.fallback_bits_per_slot,
            report.relay_bits_per_slot_approx, mc, half, decision.choice.value,
        ])
    return rows


SWEEP_COLUMNS = [
    "nu_per_s", "blockage_fraction", "fallback_bits_per_slot", "relay_bits_per_slot_approx",
    "relay_bits_per_slot_mc", "relay_mc_halfwidth_bits", "decision",
]


def cmd_sweep_blockage(args, cfg: ScenarioConfig, out: Path) -> int:
    nus = _parse_range(args.nu_range)
    if args.slots is not None and args.slots < 1:
        raise UsageError("--slots must be >= 1")
    path = out / "sweep_blockage.csv"
    _write_csv(path, SWEEP_COLUMNS, sweep_rows(cfg, nus, args.slots, args.seed))
    _write_manifest(out, args, cfg, [path], seed=args.seed if args.slots else None)
    return 0


def cmd_region(args, cfg: ScenarioConfig, out: Path) -> int:
    thetas = _parse_list(args.theta_list, "--theta-list")
    fractions = _parse_list(args.blockage_list, "--blockage-list")
    target = cfg.traffic.offered_load_bps if args.target_rate is None else args.target_rate
    grid = decision_region(cfg, thetas, fractions, target, mean_slot_s=args.slot_mean)
    path = out / "region.csv"
    write_region_csv(grid, path)
    _write_manifest(out, args, cfg, [path])
    return 0


def validation_rows(cfg: ScenarioConfig, n_slots: int, seed: int):
    """Analytic-vs-simulated comparisons: (quantity, analytic, simulated, rel_err, rel_halfwidth, tol, ok)."""
    proc = cfg.obstacles
    samples = simulate_periods(proc, n_slots, seed=seed)
    stats = blockage_stats(proc)
    x, t = samples.nonlos_s, samples.slot_s
    n = math.sqrt(n_slots)

    def ratio_halfwidth(num, den):
        r = num.sum() / den.sum()
        return 1.96 * np.std(num - r * den, ddof=1) / (den.mean() * n)

    rates = rate_set(cfg)
    t_a = alignment_overhead(cfg.antenna)
    report, _ = throughput_report(cfg)
    mc, mc_half = relay_throughput_mc(rates.c_rm_bps, samples, t_a)
    entries = [
        ("mean_nonlos_s", stats.mean_nonlos_s, float(x.mean()), 1.96 * x.std(ddof=1) / n),
        ("mean_los_s", stats.mean_los_s, float(samples.los_s.mean()), 1.96 * samples.los_s.std(ddof=1) / n),
        ("blockage_fraction", stats.blockage_fraction, samples.busy_fraction(), ratio_halfwidth(x, t)),
        ("mean_occupancy", proc.lambda_per_s / proc.nu_per_s, samples.mean_occupancy(),
         ratio_halfwidth(samples.obstacle_time_s, t)),
        ("relay_bits_per_slot", report.relay_bits_per_slot_approx, mc, mc_half),
    ]
    rows = []
    for name, analytic, simulated, half in entries:
        rel_err = abs(simulated - analytic) / abs(analytic)
        rel_half = float(half) / abs(analytic)
        tol = max(VALIDATE_TOLERANCES[name], 1.5 * rel_half)
        rows.append([name, analytic, simulated, rel_err, rel_half, tol, "pass" if rel_err <= tol else "FAIL"])
    # Informational: slot-averaged X/T next to the ratio of means.
    rows.append(["mean_of_ratios_x_over_t", stats.blockage_fraction, samples.mean_of_ratios(),
                 abs(samples.mean_of_ratios() - stats.blockage_fraction) / stats.blockage_fraction, "", "", "info"])
    return rows


VALIDATE_COLUMNS = [
    "quantity", "analytic", "simulated", "relative_error", "relative_halfwidth_95", "tolerance", "status",
]


def cmd_validate(args, cfg: ScenarioConfig, out: Path) -> int:
    if args.slots < MIN_VALIDATE_SLOTS:
        raise UsageError(f"--slots must be >= {MIN_VALIDATE_SLOTS}")
    rows = validation_rows(cfg, args.slots, args.seed)
    path = out / "validate.csv"
    _write_csv(path, VALIDATE_COLUMNS, rows)
    _write_manifest(out, args, cfg, [path], seed=args.seed)
    failed = [r[0] for r in rows if r[-1] == "FAIL"]
    for r in rows:
        print(f"{r[0]:>26s}  {r[-1]}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmrelay", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", type=Path, help="YAML scenario file (default: built-in 60 GHz setup)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--paper-literal-eq12", action="store_true",
                        help="short-packet rate with +log2(L) instead of +log2(L)/(2L)")
    common.add_argument("--paper-literal-eq15", action="store_true",
                        help="relay service rate without the alignment haircut")
    common.add_argument("--gain-both-ends", action="store_true", help="apply the main-lobe gain at both ends")

    p = sub.add_parser("run", parents=[common], help="throughput and delay report for one scenario")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-blockage", parents=[common], help="throughput vs blockage (departure-rate sweep)")
    p.add_argument("--nu-range", default="0.5:1.0:20", help="min:max:steps departure rates in obstacles/s")
    p.add_argument("--slots", type=int, default=None, help="add Monte Carlo relay columns with this many slots")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep_blockage)

    p = sub.add_parser("region", parents=[common], help="delay-optimal decision region")
    p.add_argument("--target-rate", type=float, default=None, help="bits/s (default: traffic.offered_load_bps)")
    p.add_argument("--theta-list", default="1,2,5,10,15,20", help="beamwidths in degrees")
    p.add_argument("--blockage-list", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
                   help="blockage fractions in (0, 1)")
    p.add_argument("--slot-mean", type=float, default=None,
                   help="fix the mean slot length in seconds instead of solving for the departure rate")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("validate", parents=[common], help="check closed forms against the obstacle simulator")
    p.add_argument("--slots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if getattr(args, "seed", 0) < 0:
            raise UsageError("--seed must be a non-negative integer")
        if args.command == "sweep-blockage":
            _parse_range(args.nu_range)
        args.out.mkdir(parents=True, exist_ok=True)
        return args.func(args, cfg, args.out)
    except (ScenarioError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
