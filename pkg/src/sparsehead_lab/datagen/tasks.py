"""Task supports, sparse task heads and the assumption checks on them."""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Sequence

import numpy as np

from ..errors import AssumptionInfeasibleError, SpecError
from .types import AssumptionReport, TaskSpec

logger = logging.getLogger(__name__)

MAX_SUPPORT_ATTEMPTS = 10_000
SINGULAR_FLOOR = 1e-6


def check_non_trivial_features(supports: Sequence[frozenset[int]], d: int) -> dict[int, bool]:
    """
    For every coordinate j, whether the supports that exclude j together
    cover every other coordinate.
    """
    everything = frozenset(range(d))
    coverage: dict[int, bool] = {}
    for j in range(d):
        union: set[int] = set()
        for s in supports:
            if j not in s:
                union |= s
        coverage[j] = union == everything - {j}
    return coverage


def check_sparse_heads(tasks: Sequence[TaskSpec], d: int) -> bool:
    """Every support is a strict subset and every head is nonzero exactly on it."""
    for task in tasks:
        if len(task.support) >= d:
            return False
        nonzero = frozenset(int(j) for j in np.flatnonzero(np.any(task.head != 0, axis=0)))
        if nonzero != task.support:
            return False
    return True


def sample_task_supports(
    d: int,
    n_tasks: int,
    min_size: int,
    max_size: int,
    seed: int,
    max_attempts: int = MAX_SUPPORT_ATTEMPTS,
) -> list[frozenset[int]]:
    """
    Draw ``n_tasks`` supports with sizes uniform in [min_size, max_size],
    resampling the whole family until every coordinate is non-trivial.

    Raises:
        SpecError: If the size bounds are invalid
        AssumptionInfeasibleError: If no family passes within ``max_attempts``
    """
    if not 1 <= min_size <= max_size < d:
        raise SpecError(f"Support sizes need 1 <= min <= max < d, got [{min_size}, {max_size}] with d={d}")
    if n_tasks < 1:
        raise SpecError(f"n_tasks must be >= 1, got {n_tasks}")

    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        supports = [
            frozenset(int(j) for j in rng.choice(d, size=int(rng.integers(min_size, max_size + 1)), replace=False))
            for _ in range(n_tasks)
        ]
        if all(check_non_trivial_features(supports, d).values()):
            logger.debug(f"Sampled {n_tasks} supports over {d} features after {attempt} attempts")
            return supports

    raise AssumptionInfeasibleError(
        f"No family of {n_tasks} supports of size [{min_size}, {max_size}] over {d} features "
        f"covered every feature in {max_attempts} attempts",
        attempts=max_attempts,
    )


def sample_task_heads(supports: Sequence[frozenset[int]], m: int, d: int, seed: int) -> list[TaskSpec]:
    """Gaussian heads (m×d) that are exactly zero off their support."""
    rng = np.random.default_rng(seed)
    tasks = []
    for support in supports:
        head = np.zeros((m, d))
        cols = sorted(support)
        head[:, cols] = rng.standard_normal((m, len(cols)))
        tasks.append(TaskSpec(support=frozenset(support), head=head))
    return tasks


def _min_singular(stacked: np.ndarray) -> float:
    rows, cols = stacked.shape
    if rows < cols:
        return 0.0
    return float(np.linalg.svd(stacked, compute_uv=False)[-1])


def check_assumptions(
    supports: Sequence[frozenset[int]],
    heads: Sequence[np.ndarray],
    d: int | None = None,
) -> AssumptionReport:
    """
    Report-only check of a task family.

    An empty family is reported as vacuous and failing. The variance check
    stacks the support columns of every head sharing a support and takes the
    smallest singular value.
    """
    if len(supports) != len(heads):
        raise SpecError(f"{len(supports)} supports but {len(heads)} heads")
    if d is None:
        if heads:
            d = int(heads[0].shape[1])
        else:
            d = max((max(s) + 1 for s in supports if s), default=0)

    supports = [frozenset(s) for s in supports]
    tasks = [TaskSpec(support=s, head=np.asarray(h, dtype=np.float64)) for s, h in zip(supports, heads)]

    grouped: dict[frozenset[int], list[np.ndarray]] = defaultdict(list)
    for task in tasks:
        grouped[task.support].append(task.head[:, sorted(task.support)])
    min_singular = {s: _min_singular(np.vstack(blocks)) for s, blocks in grouped.items()}

    report = AssumptionReport(
        n_tasks=len(tasks),
        feature_dim=d,
        coverage=check_non_trivial_features(supports, d),
        min_singular=min_singular,
        sparse_heads=bool(tasks) and check_sparse_heads(tasks, d),
        singular_floor=SINGULAR_FLOOR,
    )
    if report.vacuous:
        logger.warning("Assumption check on an empty task family is vacuous")
    return report
