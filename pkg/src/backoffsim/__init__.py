"""Batched-arrival simulator for windowed backoff algorithms."""

from .costs import CostModel, makespan
from .engine import SafetyCapExceeded, TrialTrace, WindowRecord, count_max_station_collisions, run_trial
from .experiment import ExperimentConfig, compare_to_baseline, load_scenario, run_experiment
from .policies import BackoffPolicy, Kind, WindowSchedule, next_window
from .stats import GrowthForm, SampleSet, SummaryRow, flatness_check, iqr_filter, median_ci, pct_change
from .timing import TimingParams, execution_time, execution_time_of_trace, profile, tx_delay

__version__ = "0.1.0"

__all__ = [
    "BackoffPolicy", "Kind", "WindowSchedule", "next_window",
    "run_trial", "TrialTrace", "WindowRecord", "SafetyCapExceeded", "count_max_station_collisions",
    "CostModel", "makespan",
    "TimingParams", "tx_delay", "execution_time", "execution_time_of_trace", "profile",
    "SampleSet", "SummaryRow", "GrowthForm", "iqr_filter", "pct_change", "median_ci", "flatness_check",
    "ExperimentConfig", "run_experiment", "compare_to_baseline", "load_scenario",
]
