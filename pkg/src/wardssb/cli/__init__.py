"""Command-line orchestration of the check suites."""

from .config import (
    OracleSettings,
    RunConfig,
    Tolerances,
    config_from_dict,
    config_to_dict,
    parse_config,
    serialize_config,
)
from .main import main
from .suites import ReportRow, SuiteResult, emit_tables, run_suite

__all__ = [
    "OracleSettings",
    "ReportRow",
    "RunConfig",
    "SuiteResult",
    "Tolerances",
    "config_from_dict",
    "config_to_dict",
    "emit_tables",
    "main",
    "parse_config",
    "run_suite",
    "serialize_config",
]
