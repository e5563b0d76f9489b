"""Error, bias and fuzziness of approximate joint measurements, with the
uncertainty relations built from them and a swap-test circuit that
estimates them from outcome statistics."""

from .analysis import Analysis, ErrorBreakdown, Scenario, ScenarioStats, error_breakdown, scenario_stats
from .exceptions import (
    ErrTradeoffError,
    InvalidArgumentError,
    NonJointMeasurementError,
    NumericalConsistencyError,
    ScenarioError,
    UnsupportedRelationError,
)
from .models import IndirectModel, JointObservables, Povm, bar_map, joint_from_indirect
from .relations import Relation, evaluate, evaluate_all
from .scenario import load_scenario, parse_scenario

__version__ = "0.1.0"

__all__ = [
    "Analysis", "ErrorBreakdown", "Scenario", "ScenarioStats", "error_breakdown", "scenario_stats",
    "ErrTradeoffError", "InvalidArgumentError", "NonJointMeasurementError", "NumericalConsistencyError",
    "ScenarioError", "UnsupportedRelationError",
    "IndirectModel", "JointObservables", "Povm", "bar_map", "joint_from_indirect",
    "Relation", "evaluate", "evaluate_all", "load_scenario", "parse_scenario",
]
