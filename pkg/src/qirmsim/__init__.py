"""Deterministic discrete-event simulator of a QoS-aware peer-to-peer
replica placement and query routing overlay, with baseline strategies,
experiment sweeps and CSV metrics export."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .model import (
    MetricsReport,
    NodeSpec,
    Query,
    ScenarioConfig,
    read_config,
    validate,
    write_config,
)
from .runner import Simulation, SimResult, run_scenario, run_sweep

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "MetricsReport",
    "NodeSpec",
    "Query",
    "ScenarioConfig",
    "SimResult",
    "Simulation",
    "read_config",
    "run_scenario",
    "run_sweep",
    "validate",
    "write_config",
    "__version__",
]
