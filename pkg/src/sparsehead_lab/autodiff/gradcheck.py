"""Central finite-difference gradient checker."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import ContractError
from .tensor import Tape, Tensor, capture_activation_patterns

logger = logging.getLogger(__name__)

# Gradients smaller than this are compared on an absolute scale.
REL_ERROR_FLOOR = 1e-4


@dataclass(frozen=True, slots=True)
class GradCheckResult:
    """Outcome of a finite-difference comparison."""
    max_rel_error: float
    coords_checked: int
    coords_skipped: int
    worst_param: int | None = None
    worst_index: int | None = None

    def passed(self, tolerance: float = 1e-4) -> bool:
        return self.coords_checked > 0 and self.max_rel_error < tolerance


def relative_error(analytic: float, numeric: float, floor: float = REL_ERROR_FLOOR) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def _evaluate(fn: Callable[[], Tensor]) -> tuple[float, list[bytes]]:
    with capture_activation_patterns() as patterns:
        value = fn().item()
    return value, list(patterns)


def gradcheck(
    fn: Callable[[], Tensor],
    params: Sequence[Tensor],
    *,
    h: float = 1e-5,
    coords: int = 100,
    seed: int = 0,
    max_attempts: int | None = None,
) -> GradCheckResult:
    """
    Compare reverse-mode gradients of ``fn()`` with central differences.

    ``fn`` must rebuild its graph from ``params`` on every call. Coordinates
    whose ±h evaluations change any ReLU on/off pattern sit on a kink; they
    are skipped and another coordinate is drawn.
    """
    params = list(params)
    if not params or any(not p.requires_grad for p in params):
        raise ContractError("gradcheck needs parameters with requires_grad=True")

    for p in params:
        p.zero_grad()
    with Tape() as tape:
        loss = fn()
    tape.backward(loss)
    analytic = [np.array(p.grad, copy=True) for p in params]

    sizes = np.array([p.size for p in params])
    rng = np.random.default_rng(seed)
    limit = max_attempts if max_attempts is not None else 20 * coords

    worst = 0.0
    worst_at: tuple[int | None, int | None] = (None, None)
    checked = skipped = 0
    while checked < coords and checked + skipped < limit:
        which = int(rng.choice(len(params), p=sizes / sizes.sum()))
        index = int(rng.integers(sizes[which]))
        flat = params[which].data.reshape(-1)
        original = flat[index]

        _, base_pattern = _evaluate(fn)
        flat[index] = original + h
        plus, plus_pattern = _evaluate(fn)
        flat[index] = original - h
        minus, minus_pattern = _evaluate(fn)
        flat[index] = original

        if not (plus_pattern == base_pattern == minus_pattern):
            skipped += 1
            continue

        numeric = (plus - minus) / (2.0 * h)
        err = relative_error(float(analytic[which].reshape(-1)[index]), numeric)
        if err > worst:
            worst, worst_at = err, (which, index)
        checked += 1

    logger.debug(f"gradcheck: {checked} coords, {skipped} skipped at kinks, max rel err {worst:.3e}")
    return GradCheckResult(worst, checked, skipped, *worst_at)
