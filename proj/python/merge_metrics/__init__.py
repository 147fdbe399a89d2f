"""Merging diagnostics for finitely supported measures on metric spaces."""

from ._core import (
    Measure,
    MergeMetricsError,
    Space,
    beta,
    class_sup,
    couple,
    omega_sup,
    prokhorov,
    pushforward,
    run_scenario,
    scenario_names,
    selftest,
)

__all__ = [
    "Measure",
    "MergeMetricsError",
    "Space",
    "beta",
    "class_sup",
    "couple",
    "omega_sup",
    "prokhorov",
    "pushforward",
    "run_scenario",
    "scenario_names",
    "selftest",
]
