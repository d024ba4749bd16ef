"""Per-step training events."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True, slots=True)
class StepEvent:
    """
    One logged training step.

    ``to_dict`` fixes the JSONL schema: keys in this order, ints for
    ``step`` and ``active_cols``, floats elsewhere.
    """
    step: int
    loss_infonce: float
    loss_infonce_mean: float
    loss_reg: float
    active_cols: int
    erank_r: float
    erank_z: float
    lr: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "step": int(self.step),
            "loss_infonce": float(self.loss_infonce),
            "loss_infonce_mean": float(self.loss_infonce_mean),
            "loss_reg": float(self.loss_reg),
            "active_cols": int(self.active_cols),
            "erank_r": float(self.erank_r),
            "erank_z": float(self.erank_z),
            "lr": float(self.lr),
        }
