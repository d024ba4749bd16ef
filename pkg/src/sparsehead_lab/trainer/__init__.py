"""Contrastive training loop with SparseHead."""

from .loop import Diagnostics, active_columns, diagnostic_indices, embed, snapshot_diagnostics, train
from .tasks import TaskHeadRun, train_task_heads
from .types import DEFAULT_EVAL_SIZE, RunRecord, StepRecord, TrainConfig

__all__ = [
    "TrainConfig",
    "RunRecord",
    "StepRecord",
    "DEFAULT_EVAL_SIZE",
    "train",
    "train_task_heads",
    "TaskHeadRun",
    "snapshot_diagnostics",
    "Diagnostics",
    "active_columns",
    "embed",
    "diagnostic_indices",
]
