"""SPHD checkpoint serializer.

Layout (little-endian):
    b"SPHD" | u32 version | u32 len | JSON descriptor (sorted keys, UTF-8)
    | u32 blob count | per blob: u32 name len, name, u32 ndim, u32 dims...,
    u64 element count, f64 values
"""

from __future__ import annotations

import json
import logging
import struct
from pathlib import Path
from typing import Any

import numpy as np

from ..autodiff import Tensor
from ..errors import FormatError
from .types import AffineLayer, EncoderSpec, HeadKind, HeadSpec, ModelState, RunningStats

logger = logging.getLogger(__name__)

MAGIC = b"SPHD"
FORMAT_VERSION = 1


class _Reader:
    def __init__(self, payload: bytes, path: str | None):
        self._buf = payload
        self._pos = 0
        self._path = path

    def take(self, n: int) -> bytes:
        if self._pos + n > len(self._buf):
            raise FormatError("truncated checkpoint", self._path)
        chunk = self._buf[self._pos:self._pos + n]
        self._pos += n
        return chunk

    def unpack(self, fmt: str) -> tuple[Any, ...]:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    @property
    def exhausted(self) -> bool:
        return self._pos == len(self._buf)


class CheckpointSerializer:
    """
    Converts a ModelState to and from SPHD bytes.

    The descriptor embeds both specs so a checkpoint is self-describing.
    Blobs are written in sorted name order, which makes the output a pure
    function of the model's values.
    """

    def serialize(self, model: ModelState) -> bytes:
        descriptor = {
            "encoder": model.encoder_spec.to_dict(),
            "head": model.head_spec.to_dict(),
        }
        if model.head_stats is not None:
            descriptor["head_stats"] = {
                "momentum": model.head_stats.momentum,
                "eps": model.head_stats.eps,
            }
        desc_bytes = json.dumps(descriptor, sort_keys=True).encode("utf-8")

        blobs = {name: t.data for name, t in model.named_parameters().items()}
        if model.head_stats is not None:
            blobs["head_stats.mean"] = model.head_stats.mean
            blobs["head_stats.var"] = model.head_stats.var

        parts = [MAGIC, struct.pack("<I", FORMAT_VERSION), struct.pack("<I", len(desc_bytes)), desc_bytes]
        parts.append(struct.pack("<I", len(blobs)))
        for name in sorted(blobs):
            arr = np.asarray(blobs[name], dtype=np.float64)
            name_bytes = name.encode("utf-8")
            parts.append(struct.pack("<I", len(name_bytes)))
            parts.append(name_bytes)
            parts.append(struct.pack("<I", arr.ndim))
            parts.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
            parts.append(struct.pack("<Q", arr.size))
            parts.append(arr.astype("<f8").tobytes())
        return b"".join(parts)

    def deserialize(self, payload: bytes, path: str | None = None) -> ModelState:
        reader = _Reader(payload, path)
        if reader.take(4) != MAGIC:
            raise FormatError("bad magic (expected SPHD)", path)
        (version,) = reader.unpack("<I")
        if version != FORMAT_VERSION:
            raise FormatError(f"unsupported checkpoint version {version}", path)

        (desc_len,) = reader.unpack("<I")
        try:
            descriptor = json.loads(reader.take(desc_len).decode("utf-8"))
            enc = EncoderSpec.from_dict(descriptor["encoder"])
            head = HeadSpec.from_dict(descriptor["head"])
        except (ValueError, KeyError, TypeError) as e:
            raise FormatError(f"invalid descriptor: {e}", path) from e

        blobs: dict[str, np.ndarray] = {}
        (count,) = reader.unpack("<I")
        for _ in range(count):
            (name_len,) = reader.unpack("<I")
            name = reader.take(name_len).decode("utf-8")
            (ndim,) = reader.unpack("<I")
            shape = reader.unpack(f"<{ndim}I") if ndim else ()
            (size,) = reader.unpack("<Q")
            if int(np.prod(shape)) != size:
                raise FormatError(f"blob '{name}' length {size} does not match shape {shape}", path)
            values = np.frombuffer(reader.take(8 * size), dtype="<f8").astype(np.float64)
            blobs[name] = values.reshape(shape)
        if not reader.exhausted:
            raise FormatError("trailing bytes after last blob", path)

        return self._build(enc, head, descriptor, blobs, path)

    def _build(
        self,
        enc: EncoderSpec,
        head: HeadSpec,
        descriptor: dict[str, Any],
        blobs: dict[str, np.ndarray],
        path: str | None,
    ) -> ModelState:
        def layer(prefix: str, i: int, fan_in: int, fan_out: int, bias: bool) -> AffineLayer:
            w = self._blob(blobs, f"{prefix}.{i}.weight", (fan_out, fan_in), path)
            b = self._blob(blobs, f"{prefix}.{i}.bias", (fan_out,), path) if bias else None
            return AffineLayer(
                weight=Tensor(w, requires_grad=True),
                bias=None if b is None else Tensor(b, requires_grad=True),
            )

        encoder = [layer("encoder", i, fi, fo, True) for i, (fi, fo) in enumerate(enc.layer_dims)]
        layers: list[AffineLayer] = []
        stats = None
        if head.kind == HeadKind.LINEAR:
            layers = [layer("head", 0, head.input_dim, head.output_dim, False)]
        elif head.kind == HeadKind.NONLINEAR:
            width = head.hidden_width
            layers = [
                layer("head", 0, head.input_dim, width, True),
                layer("head", 1, width, head.output_dim, True),
            ]
            if head.standardize:
                meta = descriptor.get("head_stats", {})
                stats = RunningStats(
                    mean=self._blob(blobs, "head_stats.mean", (width,), path),
                    var=self._blob(blobs, "head_stats.var", (width,), path),
                    momentum=float(meta.get("momentum", 0.1)),
                    eps=float(meta.get("eps", 1e-5)),
                )
        return ModelState(enc, head, encoder, layers, stats)

    @staticmethod
    def _blob(blobs: dict[str, np.ndarray], name: str, shape: tuple[int, ...], path: str | None) -> np.ndarray:
        if name not in blobs:
            raise FormatError(f"missing parameter blob '{name}'", path)
        arr = blobs[name]
        if arr.shape != shape:
            raise FormatError(f"blob '{name}' has shape {arr.shape}, spec needs {shape}", path)
        return arr


def save_checkpoint(model: ModelState, path: str | Path) -> None:
    """Write ``model`` to ``path`` in SPHD format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(CheckpointSerializer().serialize(model))
    logger.info(f"Wrote checkpoint {path} ({model.parameter_count} parameters)")


def load_checkpoint(path: str | Path) -> ModelState:
    """
    Read an SPHD checkpoint.

    Raises:
        FileNotFoundError: If the file does not exist
        FormatError: If the file is not a valid checkpoint
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    model = CheckpointSerializer().deserialize(path.read_bytes(), str(path))
    logger.info(f"Loaded checkpoint {path}")
    return model
