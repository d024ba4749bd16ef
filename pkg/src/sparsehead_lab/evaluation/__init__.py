"""Downstream evaluation on frozen representations."""

from .knn import DEFAULT_K, KnnMetric, knn_accuracy, knn_classify, similarity
from .probe import ProbeModel, eval_probe, train_probe

__all__ = [
    "ProbeModel",
    "train_probe",
    "eval_probe",
    "KnnMetric",
    "DEFAULT_K",
    "similarity",
    "knn_classify",
    "knn_accuracy",
]
