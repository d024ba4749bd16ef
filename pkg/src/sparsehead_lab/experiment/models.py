"""
Pydantic models for experiment documents.

Every level forbids unknown keys so a misspelled hyperparameter is a
validation error instead of a silently ignored default.
"""

from __future__ import annotations

from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field

from ..config import LabConfig
from ..datagen import AugmentationKind, AugmentationRule, ImageLayout, MixingKind, WorldConfig
from ..errors import ConfigError
from ..models import EncoderSpec, HeadKind, HeadSpec
from ..objectives import DEFAULT_LAMBDA, DEFAULT_TEMPERATURE, DEFAULT_ZERO_THRESHOLD, SparsityMode
from ..optim import LRSchedule
from ..trainer import DEFAULT_EVAL_SIZE, TrainConfig


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class EncoderModel(_Strict):
    """MLP feature extractor."""

    input_dim: int | None = Field(None, ge=1, description="Defaults to the dataset dimension")
    hidden: list[Annotated[int, Field(ge=1)]] = Field(default_factory=list)
    output_dim: int = Field(32, ge=1, description="Representation dimension d")


class HeadModel(_Strict):
    """Projection head; its input dimension is the encoder's output."""

    kind: HeadKind = HeadKind.LINEAR
    output_dim: int | None = Field(None, ge=1, description="Embedding dimension m; defaults to d")
    hidden: int | None = Field(None, ge=1, description="Nonlinear head hidden width; defaults to d")
    standardize: bool = False


class AugmentationModel(_Strict):
    kind: AugmentationKind = AugmentationKind.LATENT_NUISANCE
    noise_scale: float = Field(1.0, ge=0)
    per_task: bool = False
    flip_prob: float = Field(0.5, ge=0, le=1)
    mask_fraction: float = Field(0.1, ge=0, lt=1)


class TrainModel(_Strict):
    """Training hyperparameters; mirrors ``TrainConfig``."""

    model_config = ConfigDict(
        extra="forbid",
        populate_by_name=True,
        json_schema_extra={
            "example": {
                "encoder": {"hidden": [64], "output_dim": 32},
                "head": {"kind": "linear"},
                "batch_size": 128,
                "steps": 2000,
                "lambda": 1e-4,
                "sparsity_mode": "penalty",
            }
        },
    )

    encoder: EncoderModel = Field(default_factory=EncoderModel)
    head: HeadModel = Field(default_factory=HeadModel)
    augmentation: AugmentationModel = Field(default_factory=AugmentationModel)
    batch_size: int = Field(64, ge=2)
    steps: int = Field(1000, ge=1)
    temperature: float = Field(DEFAULT_TEMPERATURE, gt=0)
    lam: float = Field(DEFAULT_LAMBDA, ge=0, alias="lambda", description="SparseHead strength")
    sparsity_mode: SparsityMode = SparsityMode.PENALTY
    zero_threshold: float = Field(DEFAULT_ZERO_THRESHOLD, ge=0)
    lr: float = Field(1e-3, gt=0)
    lr_schedule: LRSchedule = LRSchedule.CONSTANT
    weight_decay: float = Field(1e-6, ge=0)
    seed: int = Field(0, ge=0)
    diagnostics_every: int | None = Field(None, ge=1)
    eval_size: int = Field(DEFAULT_EVAL_SIZE, ge=2)


class WorldModel(_Strict):
    latent_dim: int = Field(16, ge=1)
    obs_dim: int = Field(32, ge=1)
    n_subject: int = Field(8, ge=0)
    mixing: MixingKind = MixingKind.LINEAR
    mlp_hidden: int | None = Field(None, ge=1)
    n_classes: int = Field(4, ge=2)
    n_tasks: int = Field(0, ge=0)
    support_min: int = Field(1, ge=1)
    support_max: int | None = Field(None, ge=1)
    task_head_dim: int = Field(4, ge=1)

    def to_world_config(self) -> WorldConfig:
        return WorldConfig.from_dict(self.model_dump())


class SyntheticSource(_Strict):
    """A world sampled in memory; the only source that supports latent augmentation."""

    source: Literal["synthetic"] = "synthetic"
    world: WorldModel = Field(default_factory=WorldModel)
    world_seed: int = Field(0, ge=0)
    data_seed: int = Field(1, ge=0)
    n: int = Field(2048, ge=2)


class TdsSource(_Strict):
    source: Literal["tds"] = "tds"
    path: str
    image_shape: tuple[int, int, int] | None = Field(
        None, description="Channel-major image geometry; required for pixel augmentation"
    )


class RawSource(_Strict):
    """Raw image-batch files, imported on load."""

    source: Literal["raw"] = "raw"
    paths: list[str] = Field(..., min_length=1)
    layout: ImageLayout = ImageLayout.CIFAR10


DatasetSource = Annotated[SyntheticSource | TdsSource | RawSource, Field(discriminator="source")]


class LoggingModel(_Strict):
    level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "INFO"


class OutputModel(_Strict):
    checkpoint_name: str = "checkpoint.sphd"
    metrics_name: str = "metrics.jsonl"
    spectrum_name: str = "spectrum.csv"


class TelemetryModel(_Strict):
    console_enabled: bool = False
    console_format: Literal["compact", "json"] = "compact"


class ExperimentConfig(_Strict):
    """A complete experiment: what to train, on what, and where to write."""

    name: str = Field(..., min_length=1)
    output_dir: str = Field(..., min_length=1)
    train: TrainModel = Field(default_factory=TrainModel)
    dataset: DatasetSource = Field(default_factory=SyntheticSource)
    logging: LoggingModel = Field(default_factory=LoggingModel)
    output: OutputModel = Field(default_factory=OutputModel)
    telemetry: TelemetryModel = Field(default_factory=TelemetryModel)

    def to_lab_config(self) -> LabConfig:
        return LabConfig.from_dict(
            {
                "logging": self.logging.model_dump(),
                "output": self.output.model_dump(),
                "telemetry": self.telemetry.model_dump(),
            }
        )

    def to_train_config(self, input_dim: int | None = None, seed: int | None = None) -> TrainConfig:
        """
        Build the trainer's config.

        ``input_dim`` fills a missing ``encoder.input_dim`` (usually the
        dataset dimension); ``seed`` overrides ``train.seed``.

        Raises:
            ConfigError: If the encoder input dimension is unknown or
                disagrees with ``input_dim``, or the combination is invalid
            SpecError: If the model specs are invalid
        """
        t = self.train
        enc_in = t.encoder.input_dim if t.encoder.input_dim is not None else input_dim
        if enc_in is None:
            raise ConfigError("encoder.input_dim is not set and no dataset dimension was given")
        if input_dim is not None and enc_in != input_dim:
            raise ConfigError(f"encoder.input_dim {enc_in} != dataset dimension {input_dim}")

        d = t.encoder.output_dim
        encoder = EncoderSpec(input_dim=enc_in, hidden=tuple(t.encoder.hidden), output_dim=d)
        head = HeadSpec(
            kind=t.head.kind,
            input_dim=d,
            output_dim=t.head.output_dim if t.head.output_dim is not None else d,
            hidden=t.head.hidden,
            standardize=t.head.standardize,
        )
        return TrainConfig(
            encoder=encoder,
            head=head,
            augmentation=AugmentationRule.from_dict(t.augmentation.model_dump()),
            batch_size=t.batch_size,
            steps=t.steps,
            temperature=t.temperature,
            lam=t.lam,
            sparsity_mode=t.sparsity_mode,
            zero_threshold=t.zero_threshold,
            lr=t.lr,
            lr_schedule=t.lr_schedule,
            weight_decay=t.weight_decay,
            seed=seed if seed is not None else t.seed,
            diagnostics_every=t.diagnostics_every,
            eval_size=t.eval_size,
        )

    def summary(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "source": self.dataset.source,
            "head": self.train.head.kind.value,
            "lambda": self.train.lam,
            "sparsity_mode": self.train.sparsity_mode.value,
        }
