"""Alignment of learned features with ground-truth features."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..autodiff import Tensor
from ..errors import DimensionError, InsufficientDataError

logger = logging.getLogger(__name__)

MIN_ROWS = 10


@dataclass(frozen=True)
class AlignmentReport:
    """
    ``correlation[i, j]`` is |Pearson r| between learned dim i and GT dim j.
    ``pairs`` lists matched (learned, gt) dims, sorted by learned index, with
    ``matched`` and ``scale`` (regression slope) in the same order.
    """
    correlation: np.ndarray
    pairs: tuple[tuple[int, int], ...]
    matched: np.ndarray
    scale: np.ndarray
    zero_variance_learned: tuple[int, ...] = ()
    zero_variance_gt: tuple[int, ...] = ()

    @property
    def mcc(self) -> float:
        return float(self.matched.mean()) if self.matched.size else 0.0

    @property
    def permutation(self) -> dict[int, int]:
        return dict(self.pairs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "mcc": self.mcc,
            "pairs": [list(p) for p in self.pairs],
            "matched": [float(v) for v in self.matched],
            "scale": [float(v) for v in self.scale],
            "zero_variance_learned": list(self.zero_variance_learned),
            "zero_variance_gt": list(self.zero_variance_gt),
        }


def _centered(v: Tensor | np.ndarray) -> np.ndarray:
    data = v.data if isinstance(v, Tensor) else np.asarray(v, dtype=np.float64)
    if data.ndim != 2:
        raise DimensionError(f"gte_alignment needs 2-D arrays, got {data.shape}")
    return data - data.mean(axis=0)


def gte_alignment(learned: Tensor | np.ndarray, gt: Tensor | np.ndarray) -> AlignmentReport:
    """
    Match learned dimensions to ground-truth dimensions one-to-one so the
    total |Pearson r| is maximal.

    A zero-variance dimension correlates 0 with everything and is reported.

    Raises:
        InsufficientDataError: If fewer than 10 rows
        DimensionError: If row counts differ
    """
    a, b = _centered(learned), _centered(gt)
    if a.shape[0] != b.shape[0]:
        raise DimensionError("learned and gt row counts differ", expected=b.shape[0], actual=a.shape[0])
    if a.shape[0] < MIN_ROWS:
        raise InsufficientDataError(f"gte_alignment needs at least {MIN_ROWS} rows, got {a.shape[0]}")

    sd_a = np.sqrt((a * a).sum(axis=0))
    sd_b = np.sqrt((b * b).sum(axis=0))
    dead_a = tuple(int(i) for i in np.flatnonzero(sd_a == 0))
    dead_b = tuple(int(j) for j in np.flatnonzero(sd_b == 0))
    if dead_a or dead_b:
        logger.warning(f"Zero-variance dimensions: learned {list(dead_a)}, gt {list(dead_b)}")

    cov = a.T @ b
    denom = np.outer(sd_a, sd_b)
    corr = np.abs(np.divide(cov, denom, out=np.zeros_like(cov), where=denom > 0))
    corr = np.clip(corr, 0.0, 1.0)

    rows, cols = linear_sum_assignment(-corr)
    order = np.argsort(rows)
    rows, cols = rows[order], cols[order]

    var_b = sd_b**2
    slopes = np.array([cov[i, j] / var_b[j] if var_b[j] > 0 else 0.0 for i, j in zip(rows, cols)])

    return AlignmentReport(
        correlation=corr,
        pairs=tuple((int(i), int(j)) for i, j in zip(rows, cols)),
        matched=corr[rows, cols],
        scale=slopes,
        zero_variance_learned=dead_a,
        zero_variance_gt=dead_b,
    )
