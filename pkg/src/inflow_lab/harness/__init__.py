"""Experiment configs, presets, reports and tracking."""

from .presets import PRESETS, SUITE, Preset, get_preset, list_presets
from .report import (
    Provenance,
    SolveReport,
    Verdict,
    atomic_write,
    compare,
    config_hash,
    load_report,
)
from .experiments import ExperimentConfig, execute, run, run_suite, swirl_velocity
from .tracking import configure_tracking, maybe_log_report, tracking_enabled

__all__ = [
    "PRESETS",
    "SUITE",
    "Preset",
    "get_preset",
    "list_presets",
    "Provenance",
    "SolveReport",
    "Verdict",
    "atomic_write",
    "compare",
    "config_hash",
    "load_report",
    "ExperimentConfig",
    "execute",
    "run",
    "run_suite",
    "swirl_velocity",
    "configure_tracking",
    "maybe_log_report",
    "tracking_enabled",
]
