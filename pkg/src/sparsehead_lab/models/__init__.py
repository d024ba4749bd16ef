"""Encoder, projection heads and checkpoint persistence."""

from .checkpoint import CheckpointSerializer, load_checkpoint, save_checkpoint
from .network import encode, init_model, init_task_heads, project, regularized_matrix
from .types import AffineLayer, EncoderSpec, HeadKind, HeadSpec, ModelState, RunningStats

__all__ = [
    "EncoderSpec",
    "HeadSpec",
    "HeadKind",
    "AffineLayer",
    "RunningStats",
    "ModelState",
    "init_model",
    "init_task_heads",
    "encode",
    "project",
    "regularized_matrix",
    "CheckpointSerializer",
    "save_checkpoint",
    "load_checkpoint",
]
