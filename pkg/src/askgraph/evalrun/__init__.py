"""Dataset loading, metric computation, and masking-strategy ablations."""

from askgraph.evalrun.dataset import EvalCase, load_dataset
from askgraph.evalrun.metrics import (
    CellMetrics,
    EvalRecord,
    MetricsReport,
    profile_difficulty,
    score_case,
)
from askgraph.evalrun.runner import AblationRunner, export_failures, write_reports

__all__ = [
    "EvalCase",
    "load_dataset",
    "CellMetrics",
    "EvalRecord",
    "MetricsReport",
    "profile_difficulty",
    "score_case",
    "AblationRunner",
    "export_failures",
    "write_reports",
]
