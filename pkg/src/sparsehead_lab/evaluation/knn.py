"""k-nearest-neighbour classification on frozen features."""

from __future__ import annotations

from enum import Enum

import numpy as np

from ..errors import DegenerateInputError, DimensionError, ParameterError

DEFAULT_K = 5


class KnnMetric(str, Enum):
    COSINE = "cosine"
    EUCLIDEAN = "euclidean"


def _unit_rows(x: np.ndarray) -> np.ndarray:
    norms = np.sqrt((x * x).sum(axis=1))
    if np.any(norms == 0):
        raise DegenerateInputError("cosine kNN on a zero-norm feature vector")
    return x / norms[:, None]


def similarity(train: np.ndarray, test: np.ndarray, metric: KnnMetric | str = KnnMetric.COSINE) -> np.ndarray:
    """test × train similarity; Euclidean similarity is negative distance."""
    metric = KnnMetric(metric)
    if metric == KnnMetric.COSINE:
        return _unit_rows(test) @ _unit_rows(train).T
    sq = (test * test).sum(axis=1)[:, None] + (train * train).sum(axis=1)[None, :] - 2.0 * test @ train.T
    return -np.sqrt(np.clip(sq, 0.0, None))


def knn_classify(
    train_feats: np.ndarray,
    train_labels: np.ndarray,
    test_feats: np.ndarray,
    k: int = DEFAULT_K,
    metric: KnnMetric | str = KnnMetric.COSINE,
) -> np.ndarray:
    """
    Majority vote among the k most similar training rows.

    Neighbours with equal similarity are taken in training order. Vote ties
    go to the class with the larger summed similarity, then the lower class
    index.

    Raises:
        ParameterError: If k is not in [1, n_train]
    """
    train = np.asarray(train_feats, dtype=np.float64)
    test = np.asarray(test_feats, dtype=np.float64)
    labels = np.asarray(train_labels, dtype=np.int64)
    if train.ndim != 2 or test.ndim != 2 or train.shape[1] != test.shape[1]:
        raise DimensionError(f"train {train.shape} and test {test.shape} features do not match")
    if labels.shape != (train.shape[0],):
        raise DimensionError("one label per training row required", expected=train.shape[0], actual=labels.shape)
    if not 1 <= k <= train.shape[0]:
        raise ParameterError(f"k={k} must lie in [1, {train.shape[0]}]")
    if test.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)

    sims = similarity(train, test, metric)
    n_classes = int(labels.max()) + 1
    index = np.arange(train.shape[0])
    predictions = np.empty(test.shape[0], dtype=np.int64)
    for i, row in enumerate(sims):
        neighbours = np.lexsort((index, -row))[:k]
        votes = np.bincount(labels[neighbours], minlength=n_classes)
        mass = np.bincount(labels[neighbours], weights=row[neighbours], minlength=n_classes)
        tied = np.flatnonzero(votes == votes.max())
        best = tied[mass[tied] == mass[tied].max()]
        predictions[i] = int(best.min())
    return predictions


def knn_accuracy(
    train_feats: np.ndarray,
    train_labels: np.ndarray,
    test_feats: np.ndarray,
    test_labels: np.ndarray,
    k: int = DEFAULT_K,
    metric: KnnMetric | str = KnnMetric.COSINE,
) -> float:
    y = np.asarray(test_labels, dtype=np.int64)
    if y.size == 0:
        raise DegenerateInputError("cannot score kNN on an empty test set")
    return float(np.mean(knn_classify(train_feats, train_labels, test_feats, k, metric) == y))
