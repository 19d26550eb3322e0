"""Relay-vs-fallback link selection for blockage-prone millimeter-wave links."""
__version__ = "0.1.0"

from .scenario import ScenarioConfig, ScenarioError, load_scenario, write_scenario  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = ["ScenarioConfig", "ScenarioError", "load_scenario", "write_scenario", "BACKEND", "__version__"]
