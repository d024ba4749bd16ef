"""Linear probe: multinomial logistic regression on frozen features."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..autodiff import Tape, Tensor, logsumexp_rows, matmul, take
from ..errors import DegenerateInputError, DegenerateTaskError, DimensionError, InsufficientDataError, ParameterError

logger = logging.getLogger(__name__)

INIT_SCALE = 0.01
STD_EPS = 1e-12


@dataclass
class ProbeModel:
    """
    weight is classes × d. When trained with standardization the per-feature
    mean and std are kept and applied before the affine map.
    """
    weight: np.ndarray
    bias: np.ndarray
    trace: list[float] = field(default_factory=list)
    mean: np.ndarray | None = None
    std: np.ndarray | None = None

    @property
    def n_classes(self) -> int:
        return int(self.weight.shape[0])

    @property
    def input_dim(self) -> int:
        return int(self.weight.shape[1])

    def _prepare(self, features: np.ndarray) -> np.ndarray:
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.input_dim:
            raise DimensionError(
                f"probe expects (n, {self.input_dim}) features, got {x.shape}",
                expected=self.input_dim,
                actual=x.shape,
            )
        if self.mean is not None and self.std is not None:
            x = (x - self.mean) / self.std
        return x

    def logits(self, features: np.ndarray) -> np.ndarray:
        return self._prepare(features) @ self.weight.T + self.bias

    def predict(self, features: np.ndarray) -> np.ndarray:
        return np.argmax(self.logits(features), axis=1)


def _cross_entropy(x: Tensor, labels: np.ndarray, weight: Tensor, bias: Tensor) -> Tensor:
    logits = matmul(x, weight.T) + bias
    rows = np.arange(labels.shape[0])
    return (logsumexp_rows(logits) - take(logits, rows, labels)).sum().scale(1.0 / labels.shape[0])


def train_probe(
    features: np.ndarray,
    labels: np.ndarray,
    iters: int = 500,
    lr: float = 0.1,
    seed: int = 0,
    *,
    n_classes: int | None = None,
    standardize: bool = False,
) -> ProbeModel:
    """
    Full-batch gradient descent on the mean softmax cross-entropy.

    ``trace[i]`` is the loss before update i; the last entry is the loss
    after the final update.

    Raises:
        DegenerateTaskError: If the labels contain a single class
        InsufficientDataError: If there are fewer rows than classes
        ParameterError: If labels fall outside [0, n_classes)
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise DimensionError(f"features {x.shape} and labels {y.shape} do not line up")
    if x.shape[0] == 0:
        raise DegenerateInputError("train_probe needs at least one row")
    classes = int(y.max()) + 1 if n_classes is None else n_classes
    if y.min() < 0 or y.max() >= classes:
        raise ParameterError(f"labels must lie in [0, {classes})")
    if np.unique(y).size < 2:
        raise DegenerateTaskError("probe data has a single class")
    if x.shape[0] < classes:
        raise InsufficientDataError(f"{x.shape[0]} rows for {classes} classes")

    mean = std = None
    if standardize:
        mean = x.mean(axis=0)
        std = np.maximum(x.std(axis=0), STD_EPS)
        x = (x - mean) / std

    rng = np.random.default_rng(seed)
    weight = Tensor(INIT_SCALE * rng.standard_normal((classes, x.shape[1])), requires_grad=True)
    bias = Tensor(np.zeros(classes), requires_grad=True)
    inputs = Tensor(x)

    trace: list[float] = []
    for _ in range(iters):
        weight.zero_grad()
        bias.zero_grad()
        with Tape() as tape:
            loss = _cross_entropy(inputs, y, weight, bias)
        tape.backward(loss)
        trace.append(loss.item())
        weight.data -= lr * weight.grad
        bias.data -= lr * bias.grad
    trace.append(_cross_entropy(inputs, y, weight.detach(), bias.detach()).item())

    logger.debug(f"Probe trained: {classes} classes, loss {trace[0]:.4f} -> {trace[-1]:.4f}")
    return ProbeModel(weight=weight.data.copy(), bias=bias.data.copy(), trace=trace, mean=mean, std=std)


def eval_probe(model: ProbeModel, features: np.ndarray, labels: np.ndarray) -> float:
    """
    Top-1 accuracy.

    Raises:
        DegenerateInputError: For an empty test set
        DimensionError: If the feature dimension differs from the probe's
    """
    y = np.asarray(labels, dtype=np.int64)
    if y.size == 0:
        raise DegenerateInputError("cannot evaluate a probe on an empty test set")
    predictions = model.predict(features)
    if predictions.shape != y.shape:
        raise DimensionError("features and labels row counts differ", expected=y.shape, actual=predictions.shape)
    return float(np.mean(predictions == y))
