"""Synthetic-world, task, augmentation and dataset types."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from ..errors import ConfigError, DimensionError, SpecError

# Linear mixing matrices are resampled until their condition number is below this.
MAX_CONDITION = 100.0
LEAKY_SLOPE = 0.2


class MixingKind(str, Enum):
    """How latents become observations."""
    LINEAR = "linear"  # x = A s
    MLP = "mlp"        # x = A2 leaky_relu(A1 s)


class AugmentationKind(str, Enum):
    LATENT_NUISANCE = "latent-nuisance"
    PIXEL = "pixel"


class ImageLayout(str, Enum):
    """Raw image-batch record layouts."""
    CIFAR10 = "cifar10"    # 1 label byte + 3072 pixels
    CIFAR100 = "cifar100"  # coarse + fine label bytes + 3072 pixels

    @property
    def label_bytes(self) -> int:
        return 1 if self == ImageLayout.CIFAR10 else 2

    @property
    def n_classes(self) -> int:
        return 10 if self == ImageLayout.CIFAR10 else 100


@dataclass(frozen=True)
class WorldConfig:
    """
    Generative spec for a synthetic world.

    ``n_subject`` latent coordinates are shared by positive views; the rest
    are nuisance. When ``n_tasks`` > 0 the world also carries sampled task
    supports (over all latent coordinates) and sparse task heads.
    """
    latent_dim: int = 16
    obs_dim: int = 32
    n_subject: int = 8
    mixing: MixingKind = MixingKind.LINEAR
    mlp_hidden: int | None = None
    n_classes: int = 4
    n_tasks: int = 0
    support_min: int = 1
    support_max: int | None = None
    task_head_dim: int = 4

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "mixing", MixingKind(self.mixing))
        except ValueError as e:
            raise SpecError(f"Unknown mixing kind: {self.mixing}") from e
        if self.latent_dim < 1 or self.obs_dim < 1:
            raise SpecError("World dimensions must be >= 1")
        if not 0 <= self.n_subject <= self.latent_dim:
            raise SpecError(f"n_subject must lie in [0, {self.latent_dim}], got {self.n_subject}")
        if self.mixing == MixingKind.LINEAR and self.latent_dim > self.obs_dim:
            raise SpecError(
                f"Linear mixing needs latent_dim <= obs_dim for invertibility, "
                f"got {self.latent_dim} > {self.obs_dim}"
            )
        if self.mlp_hidden is not None and self.mlp_hidden < self.latent_dim:
            raise SpecError("mlp_hidden must be >= latent_dim for an injective decoder")
        if self.n_classes < 2:
            raise SpecError(f"n_classes must be >= 2, got {self.n_classes}")
        if self.n_tasks < 0:
            raise SpecError("n_tasks must be >= 0")
        if self.task_head_dim < 1:
            raise SpecError(f"task_head_dim must be >= 1, got {self.task_head_dim}")
        # An m-row head restricted to more than m columns is rank-deficient on its support.
        if self.n_tasks and self.support_upper > self.task_head_dim:
            raise SpecError(
                f"support_max {self.support_upper} exceeds task_head_dim {self.task_head_dim}; "
                f"task heads could not have full rank on their supports"
            )

    @property
    def support_upper(self) -> int:
        return self.support_max if self.support_max is not None else self.latent_dim - 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "latent_dim": self.latent_dim,
            "obs_dim": self.obs_dim,
            "n_subject": self.n_subject,
            "mixing": self.mixing.value,
            "mlp_hidden": self.mlp_hidden,
            "n_classes": self.n_classes,
            "n_tasks": self.n_tasks,
            "support_min": self.support_min,
            "support_max": self.support_max,
            "task_head_dim": self.task_head_dim,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> WorldConfig:
        return cls(**data)


@dataclass(frozen=True)
class TaskSpec:
    """A task: its feature support and a head nonzero exactly on those columns."""
    support: frozenset[int]
    head: np.ndarray
    batch_indices: tuple[int, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {"support": sorted(self.support), "head_shape": list(self.head.shape)}


@dataclass
class SyntheticWorld:
    """
    Ground-truth generator.

    ``mixing`` is the X×d* matrix for linear worlds; MLP worlds hold
    ``decoder`` = (A1, A2). ``prototypes`` (classes × |subject|) define the
    labeled task.
    """
    config: WorldConfig
    seed: int
    subject: tuple[int, ...]
    nuisance: tuple[int, ...]
    prototypes: np.ndarray
    mixing: np.ndarray | None = None
    decoder: tuple[np.ndarray, np.ndarray] | None = None
    tasks: list[TaskSpec] = field(default_factory=list)

    @property
    def latent_dim(self) -> int:
        return self.config.latent_dim

    @property
    def obs_dim(self) -> int:
        return self.config.obs_dim

    @property
    def is_linear(self) -> bool:
        return self.config.mixing == MixingKind.LINEAR

    def decode(self, latents: np.ndarray) -> np.ndarray:
        """Observations for latent rows (n×d* → n×X)."""
        s = np.asarray(latents, dtype=np.float64)
        if s.ndim != 2 or s.shape[1] != self.latent_dim:
            raise DimensionError(
                f"decode expects (n, {self.latent_dim}) latents, got {s.shape}",
                expected=self.latent_dim,
                actual=s.shape,
            )
        if self.mixing is not None:
            return s @ self.mixing.T
        assert self.decoder is not None
        a1, a2 = self.decoder
        h = s @ a1.T
        h = np.where(h > 0, h, LEAKY_SLOPE * h)
        return h @ a2.T

    def gt_representation(self, x: np.ndarray) -> np.ndarray:
        """
        The ground-truth extractor applied to observations.

        Only linear worlds can invert observations; MLP worlds keep latents
        alongside samples instead (``Dataset.latents``).
        """
        if self.mixing is None:
            raise SpecError("MLP worlds expose ground truth through stored latents")
        x = np.asarray(x, dtype=np.float64)
        return x @ np.linalg.pinv(self.mixing).T

    def label(self, latents: np.ndarray) -> np.ndarray:
        scores = np.asarray(latents)[:, list(self.subject)] @ self.prototypes.T
        return np.argmax(scores, axis=1).astype(np.int64)


@dataclass(frozen=True)
class AugmentationRule:
    """
    How two views of a sample are produced.

    latent-nuisance: subject latents are copied; the rest are mixed as
    ``sqrt(1-α²)·s + α·ε`` with α = ``noise_scale`` ∈ [0, 1]. With
    ``per_task`` and a world carrying tasks, the kept coordinates are a
    per-batch task support instead of the subject set.

    pixel: optional horizontal flip, pixel dropout and Gaussian jitter
    (scale ``noise_scale``), clipped to [0, 1].
    """
    kind: AugmentationKind = AugmentationKind.LATENT_NUISANCE
    noise_scale: float = 1.0
    per_task: bool = False
    flip_prob: float = 0.5
    mask_fraction: float = 0.1

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "kind", AugmentationKind(self.kind))
        except ValueError as e:
            raise ConfigError(f"Unknown augmentation kind: {self.kind}") from e
        if self.noise_scale < 0:
            raise ConfigError(f"noise_scale must be >= 0, got {self.noise_scale}")
        if self.kind == AugmentationKind.LATENT_NUISANCE and self.noise_scale > 1:
            raise ConfigError(f"Latent noise_scale must lie in [0, 1], got {self.noise_scale}")
        if not 0 <= self.flip_prob <= 1:
            raise ConfigError(f"flip_prob must lie in [0, 1], got {self.flip_prob}")
        if not 0 <= self.mask_fraction < 1:
            raise ConfigError(f"mask_fraction must lie in [0, 1), got {self.mask_fraction}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "noise_scale": self.noise_scale,
            "per_task": self.per_task,
            "flip_prob": self.flip_prob,
            "mask_fraction": self.mask_fraction,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> AugmentationRule:
        return cls(**data)


@dataclass(frozen=True)
class Dataset:
    """Feature rows with optional labels, latents and image geometry."""
    features: np.ndarray
    labels: np.ndarray | None = None
    n_classes: int = 0
    latents: np.ndarray | None = None
    image_shape: tuple[int, int, int] | None = None

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2:
            raise DimensionError(f"Dataset features must be 2-D, got {features.shape}")
        object.__setattr__(self, "features", features)
        n = features.shape[0]
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (n,):
                raise DimensionError("labels must have one entry per row", expected=n, actual=labels.shape)
            object.__setattr__(self, "labels", labels)
        if self.latents is not None and len(self.latents) != n:
            raise DimensionError("latents must have one row per sample", expected=n, actual=len(self.latents))
        if self.image_shape is not None:
            shape = tuple(int(s) for s in self.image_shape)
            if len(shape) != 3 or int(np.prod(shape)) != features.shape[1]:
                raise DimensionError(
                    f"image_shape {shape} does not match feature dim {features.shape[1]}"
                )
            object.__setattr__(self, "image_shape", shape)

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def labeled(self) -> bool:
        return self.labels is not None

    def __len__(self) -> int:
        return self.n

    def subset(self, indices: np.ndarray) -> Dataset:
        indices = np.asarray(indices, dtype=np.intp)
        return Dataset(
            features=self.features[indices],
            labels=None if self.labels is None else self.labels[indices],
            n_classes=self.n_classes,
            latents=None if self.latents is None else self.latents[indices],
            image_shape=self.image_shape,
        )


@dataclass(frozen=True)
class AssumptionReport:
    """
    Result of checking task supports and heads.

    ``coverage[j]`` is the non-trivial-feature check for coordinate j;
    ``min_singular`` maps each distinct support to the smallest singular value
    of the stacked head columns on it (a proxy for sufficient variance).
    """
    n_tasks: int
    feature_dim: int
    coverage: dict[int, bool]
    min_singular: dict[frozenset[int], float]
    sparse_heads: bool
    singular_floor: float = 1e-6

    @property
    def vacuous(self) -> bool:
        return self.n_tasks == 0

    @property
    def non_trivial_features(self) -> bool:
        return not self.vacuous and all(self.coverage.values())

    @property
    def sufficient_variance(self) -> bool:
        return not self.vacuous and all(s > self.singular_floor for s in self.min_singular.values())

    @property
    def passed(self) -> bool:
        return self.sparse_heads and self.non_trivial_features and self.sufficient_variance

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_tasks": self.n_tasks,
            "feature_dim": self.feature_dim,
            "vacuous": self.vacuous,
            "sparse_heads": self.sparse_heads,
            "non_trivial_features": self.non_trivial_features,
            "uncovered_features": sorted(j for j, ok in self.coverage.items() if not ok),
            "sufficient_variance_proxy": self.sufficient_variance,
            "min_singular": {
                ",".join(map(str, sorted(s))): v for s, v in sorted(
                    self.min_singular.items(), key=lambda kv: sorted(kv[0])
                )
            },
            "passed": self.passed,
        }
