"""Simulation designs and the replication benchmark driver."""

from .rng import StreamRole, stream
from .scenarios import (
    PRESETS,
    ErrorCase,
    GeneratedData,
    Scenario,
    ScenarioKind,
    SigmaMode,
    calibrate_sigma,
    gen_example1,
    gen_example2,
    generate,
)
from .benchmark import BenchmarkSettings, run_benchmark, run_replication, run_sweep

__all__ = [
    "StreamRole", "stream",
    "PRESETS", "ErrorCase", "GeneratedData", "Scenario", "ScenarioKind", "SigmaMode",
    "calibrate_sigma", "gen_example1", "gen_example2", "generate",
    "BenchmarkSettings", "run_benchmark", "run_replication", "run_sweep",
]
