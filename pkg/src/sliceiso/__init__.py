"""Minimum-cost isolation planning for multi-tenant 5G network slices."""

from .bnb import BnbOptions, solve_bnb
from .catalog import builtin_slice_types, isolation_taxonomy, layer_security_report
from .evaluator import check_feasibility, evaluate_slice, total_cost
from .exhaustive import SolveResult, Status, solve_exhaustive
from .model import (
    Assignment,
    CostTables,
    IsolationDomain,
    LayerSpec,
    QualityModel,
    Scenario,
    SecurityModel,
    SliceSpec,
    validate_scenario,
)
from .relaxation import lower_bound
from .scenario_io import dumps_scenario, load_scenario, loads_scenario

__all__ = [
    "Assignment",
    "BnbOptions",
    "CostTables",
    "IsolationDomain",
    "LayerSpec",
    "QualityModel",
    "Scenario",
    "SecurityModel",
    "SliceSpec",
    "SolveResult",
    "Status",
    "builtin_slice_types",
    "check_feasibility",
    "dumps_scenario",
    "evaluate_slice",
    "isolation_taxonomy",
    "layer_security_report",
    "load_scenario",
    "loads_scenario",
    "lower_bound",
    "solve_bnb",
    "solve_exhaustive",
    "total_cost",
    "validate_scenario",
]
