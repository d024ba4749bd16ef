"""Experiment document loading, path validation and dataset materialization."""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any

import yaml

from ..datagen import AugmentationKind, Dataset, SyntheticWorld, import_raw_images, load_tds, sample_dataset, sample_world
from ..errors import ConfigError
from .models import DatasetSource, ExperimentConfig, RawSource, SyntheticSource, TdsSource

logger = logging.getLogger(__name__)

SUFFIXES = (".json", ".yaml", ".yml")


def read_document(path: str | Path) -> dict[str, Any]:
    """
    Parse a JSON or YAML mapping.

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigError: On an unsupported suffix, a parse error or a non-mapping document
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Config file not found: {path}")
    suffix = path.suffix.lower()
    if suffix not in SUFFIXES:
        raise ConfigError(f"Unsupported config type '{suffix}' (expected one of {', '.join(SUFFIXES)})")

    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f) if suffix == ".json" else yaml.safe_load(f)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"Could not parse {path}: {e}") from e

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping, got {type(data).__name__}")
    return data


def _resolve(base: Path, p: str) -> str:
    candidate = Path(p).expanduser()
    return str(candidate if candidate.is_absolute() else base / candidate)


def _check_creatable(directory: Path) -> None:
    probe = directory
    while not probe.exists():
        if probe.parent == probe:
            break
        probe = probe.parent
    if not probe.is_dir():
        raise ConfigError(f"Output directory {directory} cannot be created: {probe} is not a directory")
    if not os.access(probe, os.W_OK):
        raise ConfigError(f"Output directory {directory} cannot be created: {probe} is not writable")


def validate_paths(config: ExperimentConfig, output_dir: str | None = None) -> None:
    """
    Check inputs exist and the output directory can be created.

    Raises:
        FileNotFoundError: If an input file is missing
        ConfigError: If the output directory cannot be created, or the
            augmentation kind does not fit the dataset source
    """
    source = config.dataset
    if isinstance(source, TdsSource):
        inputs = [source.path]
    elif isinstance(source, RawSource):
        inputs = list(source.paths)
    else:
        inputs = []
    for p in inputs:
        if not Path(p).is_file():
            raise FileNotFoundError(f"Dataset file not found: {p}")

    aug = config.train.augmentation.kind
    if aug == AugmentationKind.LATENT_NUISANCE and not isinstance(source, SyntheticSource):
        raise ConfigError("latent-nuisance augmentation needs a synthetic dataset source")
    if aug == AugmentationKind.PIXEL and isinstance(source, SyntheticSource):
        raise ConfigError("pixel augmentation needs an image dataset source")
    if aug == AugmentationKind.PIXEL and isinstance(source, TdsSource) and source.image_shape is None:
        raise ConfigError("pixel augmentation on a TDS source needs dataset.image_shape")
    if config.train.augmentation.per_task and not isinstance(source, SyntheticSource):
        raise ConfigError("per_task augmentation needs a synthetic world with tasks")

    _check_creatable(Path(output_dir or config.output_dir))


def load_experiment(path: str | Path, output_dir: str | None = None) -> ExperimentConfig:
    """
    Load and validate an experiment document.

    Relative dataset and output paths resolve against the document's
    directory. Nothing is computed or written here.

    Raises:
        FileNotFoundError: If the document or an input file is missing
        ConfigError: On parse errors or unusable paths
        pydantic.ValidationError: On unknown keys or invalid values
    """
    path = Path(path)
    data = read_document(path)
    config = ExperimentConfig.model_validate(data)

    base = path.parent
    updates: dict[str, Any] = {"output_dir": _resolve(base, config.output_dir)}
    source = config.dataset
    if isinstance(source, TdsSource):
        updates["dataset"] = source.model_copy(update={"path": _resolve(base, source.path)})
    elif isinstance(source, RawSource):
        updates["dataset"] = source.model_copy(update={"paths": [_resolve(base, p) for p in source.paths]})
    config = config.model_copy(update=updates)

    validate_paths(config, output_dir)
    logger.info(f"Loaded experiment '{config.name}' from {path}")
    return config


def load_dataset(source: DatasetSource) -> tuple[Dataset, SyntheticWorld | None]:
    """Materialize a dataset source; synthetic sources also return their world."""
    if isinstance(source, SyntheticSource):
        world = sample_world(source.world.to_world_config(), source.world_seed)
        return sample_dataset(world, source.n, source.data_seed), world
    if isinstance(source, TdsSource):
        return load_tds(source.path, source.image_shape), None
    return import_raw_images(source.paths, source.layout), None
