"""Adam optimizer, L2,1 proximal step and learning-rate schedules."""

from .adam import AdamState, adam_step
from .proximal import apply_prox_l21, block_soft_threshold, prox_l21
from .schedule import LRSchedule, learning_rate

__all__ = [
    "AdamState",
    "adam_step",
    "prox_l21",
    "block_soft_threshold",
    "apply_prox_l21",
    "LRSchedule",
    "learning_rate",
]
