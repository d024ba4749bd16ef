"""L2,1 column-group regularizer and support counting."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from ..autodiff import Tensor, as_tensor, column_norms
from ..errors import ConfigError, ParameterError

DEFAULT_LAMBDA = 1e-4
DEFAULT_ZERO_THRESHOLD = 1e-8


class SparsityMode(str, Enum):
    """How the L2,1 term enters training."""
    PENALTY = "penalty"    # added to the loss, subgradient 0 at zero columns
    PROXIMAL = "proximal"  # block soft-threshold after each optimizer step


@dataclass(frozen=True)
class SparsityConfig:
    lam: float = DEFAULT_LAMBDA
    mode: SparsityMode = SparsityMode.PENALTY
    zero_threshold: float = DEFAULT_ZERO_THRESHOLD

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "mode", SparsityMode(self.mode))
        except ValueError as e:
            raise ConfigError(f"Unknown sparsity mode: {self.mode}") from e
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        if self.zero_threshold < 0:
            raise ConfigError(f"zero_threshold must be >= 0, got {self.zero_threshold}")

    @property
    def active(self) -> bool:
        return self.lam > 0

    def to_dict(self) -> dict[str, Any]:
        return {"lam": self.lam, "mode": self.mode.value, "zero_threshold": self.zero_threshold}


def l21_norm(w: Tensor | np.ndarray) -> Tensor:
    """Sum of the Euclidean norms of the columns of ``w``."""
    return column_norms(as_tensor(w)).sum()


def column_support(w: Tensor | np.ndarray, threshold: float = DEFAULT_ZERO_THRESHOLD) -> frozenset[int]:
    """Indices of columns whose norm exceeds ``threshold``."""
    if threshold < 0:
        raise ParameterError(f"threshold must be >= 0, got {threshold}")
    data = w.data if isinstance(w, Tensor) else np.asarray(w, dtype=np.float64)
    norms = np.sqrt((data * data).sum(axis=0))
    return frozenset(int(j) for j in np.flatnonzero(norms > threshold))
