"""Proximal operator of the column-wise L2,1 norm."""

from __future__ import annotations

import numpy as np

from ..autodiff import Tensor, as_tensor
from ..errors import ParameterError
from ..models import ModelState, regularized_matrix


def block_soft_threshold(w: np.ndarray, eta: float) -> np.ndarray:
    """
    Shrink every column of ``w`` toward zero by ``eta`` in Euclidean norm.

    Columns with norm ≤ eta come back exactly zero.
    """
    if eta < 0:
        raise ParameterError(f"Proximal step size must be >= 0, got {eta}")
    w = np.asarray(w, dtype=np.float64)
    if eta == 0:
        return w.copy()
    norms = np.sqrt((w * w).sum(axis=0))
    safe = np.where(norms > 0, norms, 1.0)
    factor = np.where(norms > eta, 1.0 - eta / safe, 0.0)
    return w * factor[None, :]


def prox_l21(w: Tensor | np.ndarray, eta: float) -> Tensor:
    """argmin_V ½‖V − W‖_F² + eta·‖V‖_{2,1}, as a new gradient-free tensor."""
    return Tensor(block_soft_threshold(as_tensor(w).data, eta))


def apply_prox_l21(model: ModelState, eta: float) -> int:
    """
    Replace the model's regularized matrix by its proximal image, in place.

    Returns the number of columns that are exactly zero afterwards.
    """
    w = regularized_matrix(model)
    w.data[...] = block_soft_threshold(w.data, eta)
    return int(np.count_nonzero(~w.data.any(axis=0)))
