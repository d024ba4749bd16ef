"""InfoNCE over paired views."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..autodiff import Tensor, as_tensor, cosine_matrix, logsumexp_rows, take
from ..autodiff.ops import MIN_ROW_NORM
from ..errors import ConfigError, DegenerateInputError, DimensionError

DEFAULT_TEMPERATURE = 0.5


@dataclass(frozen=True)
class ContrastiveBatch:
    """
    Embeddings of 2N views; rows 2i and 2i+1 are the two views of sample i.
    """
    z: Tensor
    temperature: float = DEFAULT_TEMPERATURE

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", as_tensor(self.z))
        if self.z.ndim != 2:
            raise DimensionError(f"Embeddings must be 2-D, got shape {self.z.shape}")
        if self.z.shape[0] == 0 or self.z.shape[0] % 2:
            raise DimensionError(
                f"Embedding row count must be a positive even number, got {self.z.shape[0]}"
            )
        if not self.temperature > 0:
            raise ConfigError(f"Temperature must be > 0, got {self.temperature}")

    @property
    def n_pairs(self) -> int:
        return self.z.shape[0] // 2

    @property
    def n_anchors(self) -> int:
        return self.z.shape[0]


def positive_index(n_rows: int) -> np.ndarray:
    """Row index of each row's positive partner (2i <-> 2i+1)."""
    return np.arange(n_rows) ^ 1


def infonce(batch: ContrastiveBatch) -> Tensor:
    """
    Summed InfoNCE loss over all 2N anchors.

    For anchor l with positive p(l) the term is
    ``-cos(z_l, z_p)/τ + log Σ_{j≠l} exp(cos(z_l, z_j)/τ)``; the denominator
    holds the positive and every other row except the anchor itself.

    Raises:
        DegenerateInputError: If an embedding row has zero norm
    """
    n = batch.n_anchors
    scaled = cosine_matrix(batch.z).scale(1.0 / batch.temperature)
    rows = np.arange(n)
    normalizer = logsumexp_rows(scaled, mask=~np.eye(n, dtype=bool))
    positives = take(scaled, rows, positive_index(n))
    return (normalizer - positives).sum()


def infonce_reference(z: np.ndarray, temperature: float = DEFAULT_TEMPERATURE) -> float:
    """Plain double-loop InfoNCE; independent of the tensor engine."""
    z = np.asarray(z, dtype=np.float64)
    n = z.shape[0]
    if n == 0 or n % 2:
        raise DimensionError(f"Embedding row count must be a positive even number, got {n}")
    if not temperature > 0:
        raise ConfigError(f"Temperature must be > 0, got {temperature}")

    norms = [math.sqrt(float(np.dot(row, row))) for row in z]
    if min(norms) <= MIN_ROW_NORM:
        raise DegenerateInputError("cosine of a zero-norm row")

    def cos(i: int, j: int) -> float:
        return float(np.dot(z[i], z[j])) / (norms[i] * norms[j])

    total = 0.0
    for anchor in range(n):
        partner = anchor ^ 1
        numerator = math.exp(cos(anchor, partner) / temperature)
        denominator = 0.0
        for other in range(n):
            if other != anchor:
                denominator += math.exp(cos(anchor, other) / temperature)
        total -= math.log(numerator / denominator)
    return total
