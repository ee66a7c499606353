"""Deterministic agent-based simulation of a Mars settlement.

Settlers with four psychological resilience types produce and consume
life-support resources on a 50x50 patch grid under stochastic accidents and
periodic Earth resupply. A batch harness sweeps initial population sizes,
classifies colony viability by a bounce-back rule, and grid-searches the
invented calibration constants.
"""

from .config import ConfigError, SimConfig
from .core import (
    Martian,
    ResilienceCategory,
    SettlementState,
    SimState,
    Stressor,
    StressorKind,
    TaskThresholds,
    coping_for,
    init_state,
)
from .engine import RunResult, TickReport, run, step
from .experiments import (
    StabilityVerdict,
    SweepResult,
    SweepSpec,
    classify_stability,
    min_stable_population,
    run_sweep,
)

__all__ = [
    "ConfigError",
    "SimConfig",
    "Martian",
    "ResilienceCategory",
    "SettlementState",
    "SimState",
    "Stressor",
    "StressorKind",
    "TaskThresholds",
    "coping_for",
    "init_state",
    "RunResult",
    "TickReport",
    "run",
    "step",
    "StabilityVerdict",
    "SweepResult",
    "SweepSpec",
    "classify_stability",
    "min_stable_population",
    "run_sweep",
]

__version__ = "0.1.0"
