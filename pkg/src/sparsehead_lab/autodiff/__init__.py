"""Minimal dense-tensor engine with reverse-mode differentiation."""

from .gradcheck import GradCheckResult, gradcheck
from .ops import (
    ElementwiseKind,
    column_norms,
    cosine_matrix,
    elementwise,
    logsumexp_rows,
    matmul,
    sum_all,
    take,
    transpose,
)
from .tensor import Tape, Tensor, active_tape, as_tensor, backward

__all__ = [
    "Tensor",
    "Tape",
    "active_tape",
    "as_tensor",
    "backward",
    "ElementwiseKind",
    "matmul",
    "elementwise",
    "transpose",
    "sum_all",
    "take",
    "logsumexp_rows",
    "column_norms",
    "cosine_matrix",
    "gradcheck",
    "GradCheckResult",
]
