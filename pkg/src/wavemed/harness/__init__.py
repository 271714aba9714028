"""Signals, Monte Carlo experiments and the command line."""

from .experiment import ExperimentSpec, RiskReport, RiskRow, fit_slope, raw_visushrink, run_experiment
from .signals import SignalSpec, evaluate, generate_dataset, parse_signal

__all__ = [
    "ExperimentSpec",
    "RiskReport",
    "RiskRow",
    "SignalSpec",
    "evaluate",
    "fit_slope",
    "generate_dataset",
    "parse_signal",
    "raw_visushrink",
    "run_experiment",
]
