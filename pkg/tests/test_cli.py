import csv
import json
import math
import subprocess
import sys

import pytest

from mmrelay.cli import main
from mmrelay.rates import rate_set
from mmrelay.scenario import ScenarioConfig


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _scenario(tmp_path, text="schema: 1\n"):
    path = tmp_path / "scenario.yaml"
    path.write_text(text)
    return path


def test_run_default_scenario_picks_relay(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--scenario", str(_scenario(tmp_path)), "--out", str(out)]) == 0
    row = _rows(out / "throughput.csv")[0]
    assert row["decision"] == "relay"
    assert float(row["blockage_fraction"]) == pytest.approx(0.632, abs=1e-3)
    delay = _rows(out / "delay.csv")[0]
    assert set(delay) >= {"service_rate_fallback_bps", "utilization_relay", "delay_relay_s", "decision"}
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "run"
    assert manifest["config_echo"]["tx_power_mw"] == 2.5
    assert len(manifest["output_paths"]) == 2


def test_run_low_blockage_picks_fallback(tmp_path):
    nu = -0.5 / math.log(0.7)  # blockage fraction 0.3
    scenario = _scenario(tmp_path, f"schema: 1\nobstacles: {{nu_per_s: {nu!r}}}\n")
    out = tmp_path / "out"
    assert main(["run", "--scenario", str(scenario), "--out", str(out)]) == 0
    assert _rows(out / "throughput.csv")[0]["decision"] == "fallback"


def test_invalid_scenario_fails_without_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    status = main(["run", "--scenario", str(_scenario(tmp_path, "schema: 1\nantenna: {epsilon: 1.2}\n")),
                   "--out", str(out)])
    assert status != 0
    assert not out.exists()
    assert "epsilon" in capsys.readouterr().err


def test_sweep_blockage_shape(tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep-blockage", "--nu-range", "0.5:1.0:20", "--out", str(out)]) == 0
    rows = _rows(out / "sweep_blockage.csv")
    assert len(rows) == 20
    fallback = [float(r["fallback_bits_per_slot"]) for r in rows]
    # E[Y] is fixed, so only the microwave term moves: spread = C_dmuX * (E[X](0.5) - E[X](1.0)).
    rates = rate_set(ScenarioConfig())
    spread = rates.c_d_mu_x_bps * 2 * (math.expm1(1.0) - math.expm1(0.5))
    assert max(fallback) - min(fallback) == pytest.approx(spread, rel=1e-6)
    assert max(fallback) / min(fallback) - 1 < 0.04
    ordered = sorted(rows, key=lambda r: float(r["blockage_fraction"]))
    relay = [float(r["relay_bits_per_slot_approx"]) for r in ordered]
    assert all(b > a for a, b in zip(relay, relay[1:]))
    decisions = [r["decision"] for r in ordered]
    assert decisions[0] == "fallback" and decisions[-1] == "relay"
    assert rows[0]["relay_bits_per_slot_mc"] == ""


def test_sweep_with_monte_carlo(tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep-blockage", "--nu-range", "0.5:1.0:3", "--slots", "2000", "--seed", "3",
                 "--out", str(out)]) == 0
    rows = _rows(out / "sweep_blockage.csv")
    assert all(float(r["relay_bits_per_slot_mc"]) > 0 for r in rows)
    assert json.loads((out / "manifest.json").read_text())["seed"] == 3


@pytest.mark.parametrize("nu_range", ["1:0.5:3", "a:b:c", "0:1:3", "0.5:1.0:0"])
def test_bad_nu_range(tmp_path, nu_range):
    out = tmp_path / "o"
    assert main(["sweep-blockage", "--nu-range", nu_range, "--out", str(out)]) == 2
    assert not out.exists()


def test_region_single_cell(tmp_path):
    out = tmp_path / "region"
    assert main(["region", "--theta-list", "20", "--blockage-list", "0.1", "--target-rate", "1e8",
                 "--out", str(out)]) == 0
    rows = _rows(out / "region.csv")
    assert len(rows) == 1 and rows[0]["choice"] == "both-feasible-fallback-faster"


def test_region_all_infeasible(tmp_path):
    out = tmp_path / "region"
    assert main(["region", "--target-rate", "1e12", "--out", str(out)]) == 0
    rows = _rows(out / "region.csv")
    assert len(rows) == 6 * 9
    assert {r["choice"] for r in rows} == {"infeasible"}


def test_region_narrow_beams_keep_relay_at_high_blockage(tmp_path):
    out = tmp_path / "region"
    assert main(["region", "--theta-list", "1,20", "--blockage-list", "0.1,0.3,0.5,0.7,0.9",
                 "--target-rate", "2e9", "--out", str(out)]) == 0
    rows = [r for r in _rows(out / "region.csv") if r["theta_deg"] == "1"]
    assert rows[0]["choice"] == "both-feasible-fallback-faster"
    assert rows[-1]["choice"] in {"relay", "both-feasible-relay-faster"}


def test_region_bad_fraction(tmp_path):
    assert main(["region", "--blockage-list", "0.5,1.2", "--out", str(tmp_path / "r")]) == 2


def test_validate_passes_and_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["validate", "--slots", "100000", "--seed", "1", "--out", str(a)]) == 0
    assert main(["validate", "--slots", "100000", "--seed", "1", "--out", str(b)]) == 0
    assert (a / "validate.csv").read_bytes() == (b / "validate.csv").read_bytes()
    rows = {r["quantity"]: r for r in _rows(a / "validate.csv")}
    assert float(rows["mean_nonlos_s"]["relative_error"]) < 0.02
    assert float(rows["relay_bits_per_slot"]["relative_error"]) < 0.005
    assert rows["mean_of_ratios_x_over_t"]["status"] == "info"


def test_validate_small_run_widens_tolerance(tmp_path):
    out = tmp_path / "v"
    main(["validate", "--slots", "1000", "--seed", "1", "--out", str(out)])
    rows = {r["quantity"]: r for r in _rows(out / "validate.csv")}
    assert float(rows["mean_nonlos_s"]["relative_halfwidth_95"]) > 0.02
    assert float(rows["mean_nonlos_s"]["tolerance"]) > 0.02


def test_validate_rejects_tiny_runs(tmp_path):
    assert main(["validate", "--slots", "10", "--out", str(tmp_path / "v")]) == 2


def test_validate_fails_on_mismatch(tmp_path, monkeypatch):
    import mmrelay.cli as cli
    from mmrelay.blockage import BlockageStats

    real = cli.blockage_stats

    def skewed(proc):
        s = real(proc)
        return BlockageStats(s.mean_nonlos_s * 1.5, s.mean_los_s)

    monkeypatch.setattr(cli, "blockage_stats", skewed)
    out = tmp_path / "v"
    assert main(["validate", "--slots", "5000", "--seed", "1", "--out", str(out)]) == 1
    rows = {r["quantity"]: r for r in _rows(out / "validate.csv")}
    assert rows["mean_nonlos_s"]["status"] == "FAIL"
    assert rows["mean_los_s"]["status"] == "pass"


def test_flags_reach_config(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--paper-literal-eq12", "--paper-literal-eq15", "--gain-both-ends", "--out", str(out)]) == 0
    echo = json.loads((out / "manifest.json").read_text())["config_echo"]
    assert echo["eq12_paper_literal"] and echo["eq15_paper_literal"] and echo["gain_both_ends"]


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "mmrelay.cli", "run", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "throughput decision: relay" in proc.stdout
