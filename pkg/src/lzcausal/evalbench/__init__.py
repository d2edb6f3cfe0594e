"""Metrics, splits, hyperparameter search and experiment runners."""

from .experiments import (
    ExperimentTable,
    TuebingenResult,
    run_ar_direction_experiment,
    run_logistic_experiment,
    run_sensitivity_experiment,
    run_tuebingen,
)
from .metrics import MetricsReport, compute_metrics, imbalance_ratio
from .search import GridSearchResult, grid_search
from .splits import CVKind, CVScheme, split_train_test, stratified_kfold, timeseries_split

__all__ = [
    "CVKind",
    "CVScheme",
    "ExperimentTable",
    "GridSearchResult",
    "MetricsReport",
    "TuebingenResult",
    "compute_metrics",
    "grid_search",
    "imbalance_ratio",
    "run_ar_direction_experiment",
    "run_logistic_experiment",
    "run_sensitivity_experiment",
    "run_tuebingen",
    "split_train_test",
    "stratified_kfold",
    "timeseries_split",
]
