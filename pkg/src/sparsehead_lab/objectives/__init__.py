"""Contrastive loss, L2,1 regularizer and the combined objective."""

from .contrastive import (
    DEFAULT_TEMPERATURE,
    ContrastiveBatch,
    infonce,
    infonce_reference,
    positive_index,
)
from .loss import LossBreakdown, loss_components, total_loss
from .sparsity import (
    DEFAULT_LAMBDA,
    DEFAULT_ZERO_THRESHOLD,
    SparsityConfig,
    SparsityMode,
    column_support,
    l21_norm,
)

__all__ = [
    "DEFAULT_TEMPERATURE",
    "DEFAULT_LAMBDA",
    "DEFAULT_ZERO_THRESHOLD",
    "ContrastiveBatch",
    "infonce",
    "infonce_reference",
    "positive_index",
    "SparsityMode",
    "SparsityConfig",
    "l21_norm",
    "column_support",
    "LossBreakdown",
    "loss_components",
    "total_loss",
]
