"""Batch front-end: scenario files, fuzz suites, machine-readable reports."""

from .report import Record, Report, write_csv, write_report
from .scenario import Scenario, ScenarioError, build_isometry, build_rep, load_scenario
from .tasks import TASK_NAMES, run_fuzz, run_scenario

__all__ = [
    "Record",
    "Report",
    "Scenario",
    "ScenarioError",
    "TASK_NAMES",
    "build_isometry",
    "build_rep",
    "load_scenario",
    "run_fuzz",
    "run_scenario",
    "write_csv",
    "write_report",
]
