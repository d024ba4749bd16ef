"""Synthetic worlds, augmentation and dataset files."""

from .augment import interleave, latent_views, make_views
from .tasks import (
    check_assumptions,
    check_non_trivial_features,
    check_sparse_heads,
    sample_task_heads,
    sample_task_supports,
)
from .tds import IMAGE_SHAPE, decode_tds, encode_tds, import_raw_images, load_tds, write_tds
from .types import (
    AssumptionReport,
    AugmentationKind,
    AugmentationRule,
    Dataset,
    ImageLayout,
    MixingKind,
    SyntheticWorld,
    TaskSpec,
    WorldConfig,
)
from .world import sample_dataset, sample_world

__all__ = [
    "WorldConfig",
    "MixingKind",
    "SyntheticWorld",
    "TaskSpec",
    "AugmentationKind",
    "AugmentationRule",
    "Dataset",
    "ImageLayout",
    "AssumptionReport",
    "sample_world",
    "sample_dataset",
    "sample_task_supports",
    "sample_task_heads",
    "check_non_trivial_features",
    "check_sparse_heads",
    "check_assumptions",
    "make_views",
    "latent_views",
    "interleave",
    "IMAGE_SHAPE",
    "encode_tds",
    "decode_tds",
    "load_tds",
    "write_tds",
    "import_raw_images",
]
