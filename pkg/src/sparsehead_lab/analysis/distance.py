"""Min-max distance ratio and its concentration with dimension."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from ..autodiff import Tensor
from ..errors import DegenerateInputError, DimensionError, ParameterError

logger = logging.getLogger(__name__)


def _distances(anchor: np.ndarray, others: np.ndarray) -> np.ndarray:
    anchor = np.asarray(anchor, dtype=np.float64).reshape(-1)
    others = np.atleast_2d(np.asarray(others, dtype=np.float64))
    if others.shape[0] == 0:
        raise DegenerateInputError("minmax_ratio needs at least one other point")
    if others.shape[1] != anchor.shape[0]:
        raise DimensionError("points and anchor differ in dimension", expected=anchor.shape[0], actual=others.shape[1])
    diff = others - anchor
    return np.sqrt((diff * diff).sum(axis=1))


def minmax_ratio(anchor: np.ndarray, others: np.ndarray | Sequence[np.ndarray]) -> float:
    """
    (δmax − δmin) / δmin over Euclidean distances from ``anchor``.

    Raises:
        DegenerateInputError: If ``others`` is empty or contains the anchor
    """
    dist = _distances(anchor, np.asarray(others, dtype=np.float64))
    lo = float(dist.min())
    if lo == 0.0:
        raise DegenerateInputError("a point coincides with the anchor (δmin = 0)")
    return (float(dist.max()) - lo) / lo


@dataclass(frozen=True)
class MinMaxStats:
    """M over every row used as anchor against all other rows."""
    mean: float
    median: float
    min: float
    max: float
    n_anchors: int
    n_skipped: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def minmax_stats(z: Tensor | np.ndarray) -> MinMaxStats:
    """
    Summary of M with each row as anchor; anchors that duplicate another
    row are skipped and counted.

    Raises:
        DegenerateInputError: If fewer than two rows, or every anchor is degenerate
    """
    data = z.data if isinstance(z, Tensor) else np.asarray(z, dtype=np.float64)
    n = data.shape[0]
    if n < 2:
        raise DegenerateInputError(f"minmax_stats needs at least 2 rows, got {n}")

    ratios = []
    skipped = 0
    for i in range(n):
        try:
            ratios.append(minmax_ratio(data[i], np.delete(data, i, axis=0)))
        except DegenerateInputError:
            skipped += 1
    if skipped:
        logger.warning(f"minmax_stats skipped {skipped} of {n} anchors with duplicate points")
    if not ratios:
        raise DegenerateInputError("every anchor coincides with another point")

    values = np.array(ratios)
    return MinMaxStats(
        mean=float(values.mean()),
        median=float(np.median(values)),
        min=float(values.min()),
        max=float(values.max()),
        n_anchors=len(ratios),
        n_skipped=skipped,
    )


@dataclass(frozen=True)
class ConcentrationPoint:
    d: int
    mean_m: float
    std_m: float


def concentration_curve(dims: Sequence[int], n: int, trials: int, seed: int) -> list[ConcentrationPoint]:
    """
    Mean M for ``n`` i.i.d. unit-Gaussian points and a Gaussian anchor, per dimension.

    Trial t at dimension d draws from ``default_rng([seed + t, d])`` so trials
    are independent of evaluation order.
    """
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims) or any(b <= a for a, b in zip(dims, dims[1:])):
        raise ParameterError(f"dims must be positive and strictly ascending, got {dims}")
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")

    curve = []
    for d in dims:
        values = []
        for trial in range(trials):
            rng = np.random.default_rng([seed + trial, d])
            points = rng.standard_normal((n, d))
            anchor = rng.standard_normal(d)
            values.append(minmax_ratio(anchor, points))
        arr = np.array(values)
        curve.append(ConcentrationPoint(d=d, mean_m=float(arr.mean()), std_m=float(arr.std())))
        logger.debug(f"concentration d={d}: mean M={arr.mean():.4f}")
    return curve
