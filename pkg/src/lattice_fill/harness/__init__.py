"""Experiment recipes, fitting, scaling checks, export and command line."""

from .analysis import (
    FitError,
    FitResult,
    collapse_check,
    departure_time,
    fit,
    front_position,
    front_speeds,
    relaxation_exponent,
    relaxation_time,
    relaxation_window,
)
from .checks import Check, check_result, report
from .experiment import (
    METHODS,
    RECIPES,
    ExperimentConfig,
    ExperimentResult,
    ProfileRecord,
    Series,
    make_config,
    run,
)
from .export import export, read_csv

__all__ = [
    "METHODS",
    "RECIPES",
    "Check",
    "ExperimentConfig",
    "ExperimentResult",
    "FitError",
    "FitResult",
    "ProfileRecord",
    "Series",
    "check_result",
    "collapse_check",
    "departure_time",
    "export",
    "fit",
    "front_position",
    "front_speeds",
    "make_config",
    "read_csv",
    "relaxation_exponent",
    "relaxation_time",
    "relaxation_window",
    "report",
    "run",
]
