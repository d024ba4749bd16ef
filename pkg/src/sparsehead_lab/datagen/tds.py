"""TDS tensor-dataset files and raw image-batch import.

TDS layout (little-endian):
    b"TDS1" | u32 n | u32 dim | u32 n_classes (0 = unlabeled)
    | n·dim f64 features | n u16 labels (labeled only)
"""

from __future__ import annotations

import logging
import struct
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from ..errors import FormatError
from .types import Dataset, ImageLayout

logger = logging.getLogger(__name__)

MAGIC = b"TDS1"
_HEADER = struct.Struct("<4sIII")
IMAGE_SHAPE = (3, 32, 32)
PIXELS_PER_IMAGE = 3 * 32 * 32
MAX_CLASSES = 2**16


def encode_tds(dataset: Dataset) -> bytes:
    n_classes = dataset.n_classes if dataset.labeled else 0
    if dataset.labeled:
        assert dataset.labels is not None
        if not 1 <= n_classes <= MAX_CLASSES:
            raise FormatError(f"n_classes {n_classes} not representable in TDS")
        if dataset.n and (dataset.labels.min() < 0 or dataset.labels.max() >= n_classes):
            raise FormatError("labels out of range for n_classes")
    parts = [
        _HEADER.pack(MAGIC, dataset.n, dataset.dim, n_classes),
        dataset.features.astype("<f8").tobytes(),
    ]
    if dataset.labeled:
        assert dataset.labels is not None
        parts.append(dataset.labels.astype("<u2").tobytes())
    return b"".join(parts)


def decode_tds(payload: bytes, path: str | None = None, image_shape: tuple[int, int, int] | None = None) -> Dataset:
    if len(payload) < _HEADER.size:
        raise FormatError("truncated header", path)
    magic, n, dim, n_classes = _HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r} (expected {MAGIC!r})", path)

    feature_bytes = 8 * n * dim
    label_bytes = 2 * n if n_classes else 0
    expected = _HEADER.size + feature_bytes + label_bytes
    if len(payload) < expected:
        raise FormatError(f"truncated file: {len(payload)} bytes, expected {expected}", path)
    if len(payload) > expected:
        raise FormatError(f"{len(payload) - expected} trailing bytes", path)

    offset = _HEADER.size
    features = np.frombuffer(payload, dtype="<f8", count=n * dim, offset=offset).astype(np.float64)
    labels = None
    if n_classes:
        labels = np.frombuffer(payload, dtype="<u2", count=n, offset=offset + feature_bytes).astype(np.int64)
        if n and labels.max() >= n_classes:
            raise FormatError(f"label {int(labels.max())} out of range for {n_classes} classes", path)
    return Dataset(
        features=features.reshape(n, dim),
        labels=labels,
        n_classes=int(n_classes),
        image_shape=image_shape,
    )


def write_tds(dataset: Dataset, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_tds(dataset))
    logger.info(f"Wrote {dataset.n} rows (dim {dataset.dim}) to {path}")


def load_tds(path: str | Path, image_shape: tuple[int, int, int] | None = None) -> Dataset:
    """
    Read a TDS file.

    Raises:
        FileNotFoundError: If the file does not exist
        FormatError: On bad magic, truncation, trailing bytes or out-of-range labels
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dataset not found: {path}")
    dataset = decode_tds(path.read_bytes(), str(path), image_shape)
    logger.info(f"Loaded {dataset.n} rows (dim {dataset.dim}, {dataset.n_classes} classes) from {path}")
    return dataset


def _parse_raw(payload: bytes, layout: ImageLayout, path: str) -> tuple[np.ndarray, np.ndarray]:
    record = layout.label_bytes + PIXELS_PER_IMAGE
    if len(payload) % record:
        raise FormatError(f"size {len(payload)} is not a multiple of the {record}-byte record", path)
    raw = np.frombuffer(payload, dtype=np.uint8).reshape(-1, record)
    labels = raw[:, layout.label_bytes - 1].astype(np.int64)
    if labels.size and labels.max() >= layout.n_classes:
        raise FormatError(f"label {int(labels.max())} out of range for {layout.value}", path)
    pixels = raw[:, layout.label_bytes:].astype(np.float64) / 255.0
    return pixels, labels


def import_raw_images(paths: str | Path | Sequence[str | Path], layout: ImageLayout | str = ImageLayout.CIFAR10) -> Dataset:
    """
    Convert raw image-batch files (label byte(s) then 3072 channel-major
    pixel bytes per record) into one dataset with pixels scaled to [0, 1].

    For the two-label-byte layout the second (fine) label is used.
    """
    layout = ImageLayout(layout)
    if isinstance(paths, (str, Path)):
        paths = [paths]
    if not paths:
        raise FormatError("no raw image files given")

    features, labels = [], []
    for p in map(Path, paths):
        if not p.exists():
            raise FileNotFoundError(f"Raw image file not found: {p}")
        f, y = _parse_raw(p.read_bytes(), layout, str(p))
        features.append(f)
        labels.append(y)

    dataset = Dataset(
        features=np.vstack(features),
        labels=np.concatenate(labels),
        n_classes=layout.n_classes,
        image_shape=IMAGE_SHAPE,
    )
    logger.info(f"Imported {dataset.n} {layout.value} images from {len(paths)} file(s)")
    return dataset
