"""Learning-rate schedules."""

from __future__ import annotations

import math
from enum import Enum

from ..errors import ConfigError


class LRSchedule(str, Enum):
    CONSTANT = "constant"
    COSINE = "cosine"


def learning_rate(base_lr: float, step: int, total_steps: int, schedule: LRSchedule | str) -> float:
    """Rate for 0-based ``step`` out of ``total_steps``; cosine decays toward 0."""
    schedule = LRSchedule(schedule)
    if total_steps < 1 or not 0 <= step < total_steps:
        raise ConfigError(f"step {step} outside schedule of {total_steps} steps")
    if schedule == LRSchedule.CONSTANT:
        return base_lr
    return base_lr * 0.5 * (1.0 + math.cos(math.pi * step / total_steps))
