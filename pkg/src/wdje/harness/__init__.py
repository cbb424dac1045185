"""Desk-scale experiment engine: synthetic tasks, training baselines,
subtask sweeps and report assembly."""

from .models import (
    MULTINOMIAL_LOGISTIC,
    RIDGE,
    TrainConfig,
    logistic_accuracy,
    logistic_proba,
    logistic_risk,
    ridge_risk,
    train_target_baseline,
    train_transfer_baseline,
)
from .report import dumps_csv, dumps_json, sweep_report, write_csv, write_json
from .sweep import (
    METRIC_COLUMNS,
    ROW_FIELDS,
    PipelineConfig,
    SweepEvaluation,
    SweepGrid,
    SweepRow,
    evaluate_sweep,
    run_cell,
    run_sweep,
)
from .synth import SyntheticConfig, gen_synthetic_pair

__all__ = [
    "METRIC_COLUMNS",
    "MULTINOMIAL_LOGISTIC",
    "RIDGE",
    "ROW_FIELDS",
    "PipelineConfig",
    "SweepEvaluation",
    "SweepGrid",
    "SweepRow",
    "SyntheticConfig",
    "TrainConfig",
    "dumps_csv",
    "dumps_json",
    "evaluate_sweep",
    "gen_synthetic_pair",
    "logistic_accuracy",
    "logistic_proba",
    "logistic_risk",
    "ridge_risk",
    "run_cell",
    "run_sweep",
    "sweep_report",
    "train_target_baseline",
    "train_transfer_baseline",
    "write_csv",
    "write_json",
]
