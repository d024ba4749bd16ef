"""Training configuration and run records."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from ..datagen import AugmentationRule
from ..errors import ConfigError
from ..models import EncoderSpec, HeadKind, HeadSpec
from ..objectives import DEFAULT_LAMBDA, DEFAULT_TEMPERATURE, DEFAULT_ZERO_THRESHOLD, SparsityConfig, SparsityMode
from ..optim import LRSchedule
from ..telemetry import StepEvent, event_line

DEFAULT_EVAL_SIZE = 512
DIAGNOSTIC_SNAPSHOTS = 20


@dataclass
class TrainConfig:
    """Everything that determines a training run."""
    encoder: EncoderSpec
    head: HeadSpec
    augmentation: AugmentationRule = field(default_factory=AugmentationRule)
    batch_size: int = 64
    steps: int = 1000
    temperature: float = DEFAULT_TEMPERATURE
    lam: float = DEFAULT_LAMBDA
    sparsity_mode: SparsityMode = SparsityMode.PENALTY
    zero_threshold: float = DEFAULT_ZERO_THRESHOLD
    lr: float = 1e-3
    lr_schedule: LRSchedule = LRSchedule.CONSTANT
    weight_decay: float = 1e-6
    seed: int = 0
    diagnostics_every: int | None = None
    eval_size: int = DEFAULT_EVAL_SIZE

    def __post_init__(self) -> None:
        self.sparsity_mode = SparsityMode(self.sparsity_mode)
        self.lr_schedule = LRSchedule(self.lr_schedule)
        self.validate()

    def validate(self) -> None:
        """
        Raises:
            ConfigError: If any field is out of range
        """
        if self.batch_size < 2:
            raise ConfigError(f"batch_size must be >= 2 so every anchor has negatives, got {self.batch_size}")
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if not self.temperature > 0:
            raise ConfigError(f"temperature must be > 0, got {self.temperature}")
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        if not self.lr > 0:
            raise ConfigError(f"lr must be > 0, got {self.lr}")
        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if self.diagnostics_every is not None and self.diagnostics_every < 1:
            raise ConfigError("diagnostics_every must be >= 1")
        if self.eval_size < 2:
            raise ConfigError(f"eval_size must be >= 2, got {self.eval_size}")
        if self.head.input_dim != self.encoder.output_dim:
            raise ConfigError(
                f"head input_dim {self.head.input_dim} != encoder output_dim {self.encoder.output_dim}"
            )
        if self.head.kind == HeadKind.IDENTITY and self.lam > 0:
            raise ConfigError("The identity head has no regularized matrix; lambda must be 0")

    @property
    def sparsity(self) -> SparsityConfig:
        return SparsityConfig(lam=self.lam, mode=self.sparsity_mode, zero_threshold=self.zero_threshold)

    @property
    def diagnostics_interval(self) -> int:
        if self.diagnostics_every is not None:
            return self.diagnostics_every
        return max(self.steps // DIAGNOSTIC_SNAPSHOTS, 1)

    def to_dict(self) -> dict[str, Any]:
        return {
            "encoder": self.encoder.to_dict(),
            "head": self.head.to_dict(),
            "augmentation": self.augmentation.to_dict(),
            "batch_size": self.batch_size,
            "steps": self.steps,
            "temperature": self.temperature,
            "lam": self.lam,
            "sparsity_mode": self.sparsity_mode.value,
            "zero_threshold": self.zero_threshold,
            "lr": self.lr,
            "lr_schedule": self.lr_schedule.value,
            "weight_decay": self.weight_decay,
            "seed": self.seed,
            "diagnostics_every": self.diagnostics_every,
            "eval_size": self.eval_size,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TrainConfig:
        data = dict(data)
        try:
            encoder = EncoderSpec.from_dict(data.pop("encoder"))
            head = HeadSpec.from_dict(data.pop("head"))
        except KeyError as e:
            raise ConfigError(f"TrainConfig needs {e}") from e
        augmentation = AugmentationRule.from_dict(data.pop("augmentation", {}))
        try:
            return cls(encoder=encoder, head=head, augmentation=augmentation, **data)
        except TypeError as e:
            raise ConfigError(str(e)) from e

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True, slots=True)
class StepRecord:
    """
    Loss components of one update. ``loss_total`` is InfoNCE + λ·L2,1 in both
    sparsity modes, measured before any proximal step.
    """
    step: int
    loss_infonce: float
    loss_reg: float
    loss_total: float
    lr: float


@dataclass
class RunRecord:
    """
    Full trace of a run.

    ``steps`` has one entry per update; ``events`` and ``spectra`` only at
    logged steps. Wall-clock time is excluded from equality so replayed
    runs compare equal.
    """
    config_hash: str
    steps: list[StepRecord] = field(default_factory=list)
    events: list[StepEvent] = field(default_factory=list)
    spectra: list[dict[str, Any]] = field(default_factory=list)
    wall_clock_seconds: float = field(default=0.0, compare=False)

    @property
    def final_event(self) -> StepEvent | None:
        return self.events[-1] if self.events else None

    @property
    def losses(self) -> list[float]:
        return [s.loss_infonce for s in self.steps]

    def to_jsonl_lines(self) -> list[str]:
        return [event_line(e) for e in self.events]

    def to_dict(self) -> dict[str, Any]:
        return {
            "config_hash": self.config_hash,
            "n_steps": len(self.steps),
            "events": [e.to_dict() for e in self.events],
            "spectra": self.spectra,
            "wall_clock_seconds": self.wall_clock_seconds,
        }
