"""Exit criteria. Each test records a PASS/FAIL line shown in the pytest terminal summary."""
import math
from dataclasses import replace

import numpy as np

from mmrelay.analysis import (
    crossover_fraction, decision_sides, fallback_throughput, relay_throughput_approx, relay_throughput_mc,
    throughput_report,
)
from mmrelay.blockage import BlockageStats, blockage_stats, expected_los, expected_nonlos, simulate_periods
from mmrelay.channel import alignment_overhead, noise_power_dbm
from mmrelay.cli import main, sweep_rows
from mmrelay.delay import decision_region, delay_decision, md1_delay
from mmrelay.rates import RateSet, rate_set
from mmrelay.scenario import AntennaPattern, ObstacleProcess, ScenarioConfig

SWEEP_NUS = np.linspace(0.5, 1.0, 20)


def _with_theta(cfg, theta_deg):
    return replace(cfg, antenna=replace(cfg.antenna, theta_rad=math.radians(theta_deg)))


def _sweep_crossover(rows):
    """Blockage fraction midway between the last fallback row and the first relay row."""
    ordered = sorted(rows, key=lambda r: r[1])
    for a, b in zip(ordered, ordered[1:]):
        if a[-1] == "fallback" and b[-1] == "relay":
            return 0.5 * (a[1] + b[1])
    return math.nan


def test_ac1_alignment_overhead(criterion):
    def ta(theta):
        return alignment_overhead(AntennaPattern(math.radians(theta), math.radians(90), 0.05, 20e-6))

    t20, t1 = ta(20.0), ta(1.0)
    ok = t20 == 0.5e-3 and abs(t1 - 0.16) / 0.16 <= 0.025
    criterion("AC1", ok, f"T_a(20 deg)={t20:.6g} s (exact 5e-4), T_a(1 deg)={t1:.6g} s (0.16 s +/-2.5%)")


def test_ac2_noise_calibration(criterion):
    mu, mm = noise_power_dbm(20e6), noise_power_dbm(2.16e9)
    ok = abs(mu + 101) <= 0.05 and abs(mm + 80.7) <= 0.05
    criterion("AC2", ok, f"noise 20 MHz={mu:.3f} dBm, 2.16 GHz={mm:.3f} dBm (+/-0.05 dB)")


def test_ac3_blockage_oracle(criterion):
    worst = 0.0
    for i, nu in enumerate((0.5, 0.75, 1.0)):
        proc = ObstacleProcess(0.5, nu)
        s = simulate_periods(proc, 100_000, seed=(3, i))
        stats = blockage_stats(proc)
        errs = (
            abs(s.nonlos_s.mean() / expected_nonlos(proc) - 1),
            abs(s.los_s.mean() / expected_los(proc) - 1),
            abs(s.busy_fraction() / stats.blockage_fraction - 1),
        )
        worst = max(worst, *errs)
    criterion("AC3", worst <= 0.02, f"worst relative error over E[X], E[Y], busy fraction = {worst:.4%} (<= 2%)")


def test_ac4_assumption1(criterion):
    cfg = ScenarioConfig()
    worst = 0.0
    for i, nu in enumerate(SWEEP_NUS):
        proc = ObstacleProcess(0.5, float(nu))
        samples = simulate_periods(proc, 1_000_000, seed=(4, i))
        for theta in (1.0, 20.0):
            point = _with_theta(cfg, theta)
            c_rm, t_a = rate_set(point).c_rm_bps, alignment_overhead(point.antenna)
            mc, _ = relay_throughput_mc(c_rm, samples, t_a)
            closed = relay_throughput_approx(c_rm, blockage_stats(proc), t_a)
            worst = max(worst, abs(mc / closed - 1))
    criterion("AC4", worst <= 0.005,
              f"max |MC - closed form| / closed form = {worst:.4%} over 20 nu x 2 theta, 1e6 slots (<= 0.5%)")


def test_ac5_throughput_crossover(criterion):
    cfg = _with_theta(ScenarioConfig(), 20.0)
    swept = _sweep_crossover(sweep_rows(cfg, SWEEP_NUS))
    closed = crossover_fraction(rate_set(cfg), 2.0, alignment_overhead(cfg.antenna))
    ok = abs(swept - 0.5) <= 0.05 and abs(closed - 0.5) <= 0.05
    criterion("AC5", ok, f"theta=20 deg flip at blockage {swept:.4f} (sweep), {closed:.4f} (exact); 0.50 +/- 0.05")


def test_ac6_narrow_beam_shift(criterion):
    base = ScenarioConfig()
    wide, narrow = _with_theta(base, 20.0), _with_theta(base, 1.0)
    x_wide = crossover_fraction(rate_set(wide), 2.0, alignment_overhead(wide.antenna))
    x_narrow = crossover_fraction(rate_set(narrow), 2.0, alignment_overhead(narrow.antenna))
    sw_wide = _sweep_crossover(sweep_rows(wide, SWEEP_NUS))
    sw_narrow = _sweep_crossover(sweep_rows(narrow, SWEEP_NUS))
    higher = True
    for nu in SWEEP_NUS:
        proc = ObstacleProcess(0.5, float(nu))
        rw, _ = throughput_report(replace(wide, obstacles=proc))
        rn, _ = throughput_report(replace(narrow, obstacles=proc))
        higher &= rn.fallback_bits_per_slot > rw.fallback_bits_per_slot
        higher &= rn.relay_bits_per_slot_approx > rw.relay_bits_per_slot_approx
    ok = x_narrow > x_wide and sw_narrow >= sw_wide and higher
    criterion("AC6", ok, f"crossover 1 deg={x_narrow:.4f} > 20 deg={x_wide:.4f}; "
                         f"both throughputs higher at 1 deg for every sweep point: {higher}")


def test_ac7_delay_properties(criterion):
    checks = {}
    services = [1.0, 3.0, 2.5e9, 7.1e9]
    checks["tau(0,S)=1/S"] = all(md1_delay(0.0, s) == 1 / s for s in services)
    increasing = True
    for s in services:
        taus = [md1_delay(g, s) for g in np.linspace(0, s, 1001)[:-1]]
        increasing &= all(b > a for a, b in zip(taus, taus[1:]))
    checks["increasing"] = increasing
    checks["diverged"] = all(math.isinf(md1_delay(r * s, s)) for s in services for r in (1.0, 1.5))

    # Relay slower than fallback: narrow beam, short slots (fixed mean slot, as in the short-slot case).
    cfg = _with_theta(ScenarioConfig(), 1.0)
    stats = BlockageStats.from_fraction(0.55, 0.3)
    report, _ = delay_decision(cfg, 0.0, stats)
    s_fb, s_rl = report.service_rate_fallback_bps, report.service_rate_relay_bps
    shape = s_rl < s_fb
    for g in np.linspace(0, s_fb, 400, endpoint=False):
        r, out = delay_decision(cfg, float(g), stats)
        if g < s_rl:
            shape &= r.delay_fallback_s < r.delay_relay_s
        else:
            shape &= math.isinf(r.delay_relay_s) and math.isfinite(r.delay_fallback_s)
        shape &= out.choice.value == "fallback"
    checks["slow-relay-shape"] = shape
    criterion("AC7", all(checks.values()), ", ".join(f"{k}: {v}" for k, v in checks.items()))


def test_ac8_decision_region(criterion):
    cfg = ScenarioConfig()
    thetas = [1.0, 2.0, 5.0, 10.0, 15.0, 20.0]
    fractions = [round(f, 4) for f in np.arange(0.05, 0.95 + 1e-9, 0.0025)]
    grid = decision_region(cfg, thetas, fractions, 2e9)
    onsets = [grid.relay_onset(t) for t in thetas]
    narrow_ok = abs(onsets[0] - 0.8) <= 0.1
    widening_ok = all(b <= a for a, b in zip(onsets, onsets[1:])) and onsets[-1] < onsets[0]
    detail = ", ".join(f"{t:g} deg: {o:.4f}" for t, o in zip(thetas, onsets))
    criterion("AC8", narrow_ok and widening_ok,
              f"relay onset per theta [{detail}]; 1 deg within 0.8 +/- 0.1: {narrow_ok}; "
              f"non-increasing as theta widens: {widening_ok}")


def test_ac9_consistency_identity(criterion):
    rng = np.random.default_rng(9)
    mismatches = 0
    for _ in range(10_000):
        c_mu = rng.uniform(1e6, 1e9)
        c_m = rng.uniform(c_mu, 2e10)
        c_rm = rng.uniform(1e8, 2e10)
        stats = BlockageStats(rng.uniform(0.01, 20), rng.uniform(0.01, 20))
        t_a = rng.uniform(0, 0.99) * min(stats.mean_slot_s, 0.5)
        rates = RateSet(c_mu, c_m, c_rm, "long-packet")
        lhs, rhs = decision_sides(rates, stats, t_a)
        fb = fallback_throughput(rates, stats)
        rl = relay_throughput_approx(c_rm, stats, t_a)
        diff = fb - rl
        scale = max(abs(fb), abs(rl), abs(lhs), abs(rhs))
        if abs(diff) <= 1e-9 * scale or abs(lhs - rhs) <= 1e-9 * scale:
            continue
        mismatches += np.sign(lhs - rhs) != np.sign(diff)
    criterion("AC9", mismatches == 0, f"{mismatches} sign disagreements in 10^4 random draws (rel tol 1e-9)")


def test_ac10_determinism(criterion, tmp_path):
    outputs = []
    for run in ("a", "b"):
        v, s = tmp_path / run / "validate", tmp_path / run / "sweep"
        assert main(["validate", "--slots", "100000", "--seed", "17", "--out", str(v)]) == 0
        assert main(["sweep-blockage", "--slots", "20000", "--seed", "17", "--out", str(s)]) == 0
        outputs.append(((v / "validate.csv").read_bytes(), (s / "sweep_blockage.csv").read_bytes()))
    ok = outputs[0] == outputs[1]
    criterion("AC10", ok, "validate.csv and sweep_blockage.csv byte-identical across two seeded runs")
