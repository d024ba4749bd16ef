"""Experiment documents consumed by the CLI."""

from .loader import load_dataset, load_experiment, read_document, validate_paths
from .models import (
    AugmentationModel,
    DatasetSource,
    EncoderModel,
    ExperimentConfig,
    HeadModel,
    RawSource,
    SyntheticSource,
    TdsSource,
    TrainModel,
    WorldModel,
)

__all__ = [
    "ExperimentConfig",
    "TrainModel",
    "EncoderModel",
    "HeadModel",
    "AugmentationModel",
    "WorldModel",
    "SyntheticSource",
    "TdsSource",
    "RawSource",
    "DatasetSource",
    "load_experiment",
    "load_dataset",
    "read_document",
    "validate_paths",
]
