"""Scenario configuration for the three-node source/relay/destination setup.

Scenario files are YAML mappings with a mandatory ``schema: 1`` key.  Every
section is optional; anything left out takes the 60 GHz indoor defaults
(2.5 mW, 90 degree sectors, side-lobe gain 0.05, 10 m triangle).  Angles are
written in degrees (``theta_deg``, ``phi_deg``) but ``theta_rad`` /
``phi_rad`` are accepted too, which is what :func:`write_scenario` emits so
that a write/load round trip is exact.

Model-ambiguity flags
---------------------
gain_both_ends : bool, default False
    Apply the main-lobe gain once (False) or at both link ends (True).
eq12_paper_literal : bool, default False
    Use ``+log2(L)`` instead of ``+log2(L)/(2L)`` in the short-packet rate.
eq15_paper_literal : bool, default False
    Drop the per-slot alignment haircut from the relay service rate.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import yaml

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Raised for malformed scenario files or violated parameter invariants."""

    def __init__(self, message: str, field_name: str | None = None):
        self.field = field_name
        super().__init__(f"{field_name}: {message}" if field_name else message)


def _require(ok: bool, field_name: str, message: str) -> None:
    if not ok:
        raise ScenarioError(message, field_name)


@dataclass(frozen=True)
class BandParams:
    label: str
    carrier_ghz: float
    bandwidth_hz: float
    ref_attenuation_db: float
    atmo_db_per_km: float
    # Per-obstacle penetration loss; ignored for mmwave (obstacles are impenetrable there).
    obstacle_loss_db: float = 0.0

    def __post_init__(self):
        _require(self.label in ("microwave", "mmwave"), "label", "must be 'microwave' or 'mmwave'")
        _require(self.carrier_ghz > 0, "carrier_ghz", "must be > 0")
        _require(self.bandwidth_hz > 0, "bandwidth_hz", "must be > 0")
        _require(self.ref_attenuation_db > 0, "ref_attenuation_db", "must be > 0")
        _require(self.atmo_db_per_km >= 0, "atmo_db_per_km", "must be >= 0")
        _require(self.obstacle_loss_db >= 0, "obstacle_loss_db", "must be >= 0")


@dataclass(frozen=True)
class AntennaPattern:
    theta_rad: float
    phi_rad: float
    epsilon: float
    pilot_time_s: float

    def __post_init__(self):
        _require(0 < self.theta_rad <= 2 * math.pi, "theta", "must lie in (0, 2*pi]")
        _require(self.theta_rad <= self.phi_rad <= 2 * math.pi, "phi", "must satisfy theta <= phi <= 2*pi")
        _require(0 < self.epsilon < 1, "epsilon", "must lie in (0, 1)")
        _require(self.pilot_time_s > 0, "pilot_time_s", "must be > 0")


@dataclass(frozen=True)
class Geometry:
    d_sd_m: float = 10.0
    d_sr_m: float = 10.0
    d_rd_m: float = 10.0

    def __post_init__(self):
        for name in ("d_sd_m", "d_sr_m", "d_rd_m"):
            _require(getattr(self, name) > 0, name, "must be > 0")


@dataclass(frozen=True)
class ObstacleProcess:
    lambda_per_s: float = 0.5
    nu_per_s: float = 0.5

    def __post_init__(self):
        _require(self.lambda_per_s > 0, "lambda_per_s", "must be > 0")
        _require(self.nu_per_s > 0, "nu_per_s", "must be > 0")


@dataclass(frozen=True)
class TrafficParams:
    offered_load_bps: float = 2e9
    packet_bits: int = 2000
    packet_error_prob: float = 1e-3
    long_packet_mode: bool = True

    def __post_init__(self):
        _require(self.offered_load_bps >= 0, "offered_load_bps", "must be >= 0")
        _require(
            isinstance(self.packet_bits, int) and not isinstance(self.packet_bits, bool) and self.packet_bits >= 1,
            "packet_bits", "must be an integer >= 1",
        )
        _require(0 < self.packet_error_prob < 1, "packet_error_prob", "must lie in (0, 1)")


def default_microwave() -> BandParams:
    return BandParams("microwave", 2.4, 20e6, 46.7, 0.005)


def default_mmwave() -> BandParams:
    return BandParams("mmwave", 60.0, 2.16e9, 68.0, 16.0)


def default_antenna() -> AntennaPattern:
    return AntennaPattern(math.radians(20.0), math.radians(90.0), 0.05, 20e-6)


@dataclass(frozen=True)
class ScenarioConfig:
    microwave: BandParams = field(default_factory=default_microwave)
    mmwave: BandParams = field(default_factory=default_mmwave)
    antenna: AntennaPattern = field(default_factory=default_antenna)
    geometry: Geometry = field(default_factory=Geometry)
    obstacles: ObstacleProcess = field(default_factory=ObstacleProcess)
    traffic: TrafficParams = field(default_factory=TrafficParams)
    tx_power_mw: float = 2.5
    gain_both_ends: bool = False
    eq12_paper_literal: bool = False
    eq15_paper_literal: bool = False

    def __post_init__(self):
        _require(self.tx_power_mw > 0, "tx_power_mw", "must be > 0")
        _require(self.microwave.label == "microwave", "microwave.label", "must be 'microwave'")
        _require(self.mmwave.label == "mmwave", "mmwave.label", "must be 'mmwave'")
        _require(
            self.microwave.bandwidth_hz < self.mmwave.bandwidth_hz,
            "microwave.bandwidth_hz", "must be smaller than mmwave.bandwidth_hz",
        )


_SECTIONS = {
    "microwave": BandParams,
    "mmwave": BandParams,
    "geometry": Geometry,
    "obstacles": ObstacleProcess,
    "traffic": TrafficParams,
}
_FLAGS = ("gain_both_ends", "eq12_paper_literal", "eq15_paper_literal")


def _check_keys(section: str, data: dict, allowed) -> None:
    unknown = set(data) - set(allowed)
    if unknown:
        raise ScenarioError(f"unknown key(s) {sorted(unknown)}", section)


def _as_number(section: str, key: str, value: Any) -> Any:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"expected a number, got {value!r}", f"{section}.{key}")
    return value


def _build_section(name: str, cls, data: Any, base):
    if data is None:
        return base
    if not isinstance(data, dict):
        raise ScenarioError("expected a mapping", name)
    fields = asdict(base)
    _check_keys(name, data, fields)
    for key, value in data.items():
        if key == "label":
            fields[key] = value
        elif key == "long_packet_mode":
            if not isinstance(value, bool):
                raise ScenarioError("expected true/false", f"{name}.{key}")
            fields[key] = value
        else:
            fields[key] = _as_number(name, key, value)
    try:
        return cls(**fields)
    except ScenarioError as exc:
        raise ScenarioError(str(exc).split(": ", 1)[-1], f"{name}.{exc.field}") from None


def _build_antenna(data: Any) -> AntennaPattern:
    base = default_antenna()
    if data is None:
        return base
    if not isinstance(data, dict):
        raise ScenarioError("expected a mapping", "antenna")
    _check_keys("antenna", data, ("theta_deg", "theta_rad", "phi_deg", "phi_rad", "epsilon", "pilot_time_s"))
    angles = {}
    for name in ("theta", "phi"):
        deg, rad = f"{name}_deg", f"{name}_rad"
        if deg in data and rad in data:
            raise ScenarioError(f"give only one of {deg}, {rad}", f"antenna.{name}")
        if deg in data:
            angles[name] = math.radians(_as_number("antenna", deg, data[deg]))
        elif rad in data:
            angles[name] = float(_as_number("antenna", rad, data[rad]))
        else:
            angles[name] = getattr(base, rad)
    try:
        return AntennaPattern(
            theta_rad=angles["theta"],
            phi_rad=angles["phi"],
            epsilon=_as_number("antenna", "epsilon", data.get("epsilon", base.epsilon)),
            pilot_time_s=_as_number("antenna", "pilot_time_s", data.get("pilot_time_s", base.pilot_time_s)),
        )
    except ScenarioError as exc:
        raise ScenarioError(str(exc).split(": ", 1)[-1], f"antenna.{exc.field}") from None


def scenario_from_dict(data: Any) -> ScenarioConfig:
    """Validate a parsed scenario mapping and build the config."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must contain a mapping at top level")
    if data.get("schema") != SCHEMA_VERSION:
        raise ScenarioError(f"expected schema: {SCHEMA_VERSION}, got {data.get('schema')!r}", "schema")
    allowed = {"schema", "antenna", "tx_power_mw", *_SECTIONS, *_FLAGS}
    _check_keys("<top level>", data, allowed)

    defaults = ScenarioConfig()
    kwargs: dict[str, Any] = {
        name: _build_section(name, cls, data.get(name), getattr(defaults, name))
        for name, cls in _SECTIONS.items()
    }
    kwargs["antenna"] = _build_antenna(data.get("antenna"))
    kwargs["tx_power_mw"] = _as_number("<top level>", "tx_power_mw", data.get("tx_power_mw", defaults.tx_power_mw))
    for flag in _FLAGS:
        value = data.get(flag, getattr(defaults, flag))
        if not isinstance(value, bool):
            raise ScenarioError("expected true/false", flag)
        kwargs[flag] = value
    return ScenarioConfig(**kwargs)


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Read and validate a YAML scenario file.

    Raises
    ------
    ScenarioError
        If the file cannot be parsed or any field violates its invariant;
        the message starts with the offending field.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"malformed scenario file: {exc}") from exc
    return scenario_from_dict(data)


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    """Plain-data form of a config, angles kept in radians for exact round trips."""
    out: dict[str, Any] = {"schema": SCHEMA_VERSION}
    for name in ("microwave", "mmwave", "antenna", "geometry", "obstacles", "traffic"):
        out[name] = asdict(getattr(cfg, name))
    out["tx_power_mw"] = cfg.tx_power_mw
    for flag in _FLAGS:
        out[flag] = getattr(cfg, flag)
    return out


def write_scenario(cfg: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(scenario_to_dict(cfg), sort_keys=False))
