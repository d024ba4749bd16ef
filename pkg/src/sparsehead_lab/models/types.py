"""Model types - encoder/head specs and the trainable model state."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from ..autodiff import Tensor
from ..errors import SpecError, UnsupportedError


class HeadKind(str, Enum):
    """Projection head variants."""
    IDENTITY = "identity"    # h(r) = r
    LINEAR = "linear"        # h(r) = W r
    NONLINEAR = "nonlinear"  # affine -> relu -> affine


@dataclass(frozen=True, slots=True)
class EncoderSpec:
    """
    MLP feature extractor f: R^X -> R^d.

    Hidden layers use ReLU; the output layer is affine.
    """
    input_dim: int
    hidden: tuple[int, ...] = ()
    output_dim: int = 32
    activation: str = "relu"

    def __post_init__(self) -> None:
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        widths = (self.input_dim, *self.hidden, self.output_dim)
        if any(w < 1 for w in widths):
            raise SpecError(f"Encoder widths must be >= 1, got {widths}")
        if self.activation != "relu":
            raise SpecError(f"Unsupported encoder activation: {self.activation}")

    @property
    def layer_dims(self) -> list[tuple[int, int]]:
        """(fan_in, fan_out) for each affine layer."""
        widths = (self.input_dim, *self.hidden, self.output_dim)
        return list(zip(widths[:-1], widths[1:]))

    def to_dict(self) -> dict[str, Any]:
        return {
            "input_dim": self.input_dim,
            "hidden": list(self.hidden),
            "output_dim": self.output_dim,
            "activation": self.activation,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EncoderSpec:
        return cls(
            input_dim=int(data["input_dim"]),
            hidden=tuple(data.get("hidden", ())),
            output_dim=int(data.get("output_dim", 32)),
            activation=data.get("activation", "relu"),
        )


@dataclass(frozen=True, slots=True)
class HeadSpec:
    """
    Projection head h: R^d -> R^m.

    ``hidden`` only applies to the nonlinear head and defaults to d.
    ``standardize`` inserts an affine-free running-statistics normalization
    between the two nonlinear layers.
    """
    kind: HeadKind
    input_dim: int
    output_dim: int
    hidden: int | None = None
    standardize: bool = False

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "kind", HeadKind(self.kind))
        except ValueError as e:
            raise SpecError(f"Unknown head kind: {self.kind}") from e
        if self.input_dim < 1 or self.output_dim < 1:
            raise SpecError("Head dimensions must be >= 1")
        if self.kind == HeadKind.IDENTITY and self.output_dim != self.input_dim:
            raise SpecError(
                f"Identity head needs output_dim == input_dim, got {self.output_dim} != {self.input_dim}"
            )
        if self.hidden is not None and self.hidden < 1:
            raise SpecError("Head hidden width must be >= 1")
        if self.standardize and self.kind != HeadKind.NONLINEAR:
            raise SpecError("standardize only applies to the nonlinear head")

    @property
    def hidden_width(self) -> int:
        return self.hidden if self.hidden is not None else self.input_dim

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
            "hidden": self.hidden,
            "standardize": self.standardize,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> HeadSpec:
        return cls(
            kind=HeadKind(data["kind"]),
            input_dim=int(data["input_dim"]),
            output_dim=int(data["output_dim"]),
            hidden=data.get("hidden"),
            standardize=bool(data.get("standardize", False)),
        )


@dataclass
class AffineLayer:
    """y = x W^T + b; ``weight`` is fan_out × fan_in."""
    weight: Tensor
    bias: Tensor | None = None

    @property
    def fan_in(self) -> int:
        return self.weight.shape[1]

    @property
    def fan_out(self) -> int:
        return self.weight.shape[0]


@dataclass
class RunningStats:
    """Per-feature running mean/variance for the head's standardization layer."""
    mean: np.ndarray
    var: np.ndarray
    momentum: float = 0.1
    eps: float = 1e-5

    def update(self, batch: np.ndarray) -> None:
        if batch.shape[0] < 2:
            return
        self.mean = (1 - self.momentum) * self.mean + self.momentum * batch.mean(axis=0)
        self.var = (1 - self.momentum) * self.var + self.momentum * batch.var(axis=0, ddof=1)


@dataclass
class ModelState:
    """
    Encoder parameters θ plus head parameters φ.

    Parameters are leaf tensors updated in place by the optimizer, so tensors
    handed out by ``named_parameters`` or ``regularized_matrix`` stay current.
    """
    encoder_spec: EncoderSpec
    head_spec: HeadSpec
    encoder: list[AffineLayer] = field(default_factory=list)
    head: list[AffineLayer] = field(default_factory=list)
    head_stats: RunningStats | None = None

    def named_parameters(self) -> dict[str, Tensor]:
        params: dict[str, Tensor] = {}
        for prefix, layers in (("encoder", self.encoder), ("head", self.head)):
            for i, layer in enumerate(layers):
                params[f"{prefix}.{i}.weight"] = layer.weight
                if layer.bias is not None:
                    params[f"{prefix}.{i}.bias"] = layer.bias
        return params

    def encoder_parameters(self) -> dict[str, Tensor]:
        return {k: v for k, v in self.named_parameters().items() if k.startswith("encoder.")}

    @property
    def parameter_count(self) -> int:
        return sum(t.size for t in self.named_parameters().values())

    @property
    def encoder_parameter_count(self) -> int:
        return sum(t.size for t in self.encoder_parameters().values())

    @property
    def representation_dim(self) -> int:
        return self.encoder_spec.output_dim

    @property
    def embedding_dim(self) -> int:
        return self.head_spec.output_dim

    def regularized_name(self) -> str:
        """Parameter name of the matrix SparseHead acts on."""
        if self.head_spec.kind == HeadKind.IDENTITY:
            raise UnsupportedError("Identity head has no regularized matrix")
        return f"head.{len(self.head) - 1}.weight"

    def zero_grad(self) -> None:
        for t in self.named_parameters().values():
            t.zero_grad()

    def snapshot(self) -> ModelState:
        """Deep copy safe to analyze while training continues."""

        def copy_layer(layer: AffineLayer) -> AffineLayer:
            return AffineLayer(
                weight=Tensor(layer.weight.data.copy(), requires_grad=True),
                bias=None if layer.bias is None else Tensor(layer.bias.data.copy(), requires_grad=True),
            )

        stats = None
        if self.head_stats is not None:
            stats = RunningStats(
                self.head_stats.mean.copy(),
                self.head_stats.var.copy(),
                self.head_stats.momentum,
                self.head_stats.eps,
            )
        return ModelState(
            encoder_spec=self.encoder_spec,
            head_spec=self.head_spec,
            encoder=[copy_layer(layer) for layer in self.encoder],
            head=[copy_layer(layer) for layer in self.head],
            head_stats=stats,
        )

    def checksum(self, encoder_only: bool = False) -> str:
        """SHA-256 over parameter names and little-endian values."""
        params = self.encoder_parameters() if encoder_only else self.named_parameters()
        digest = hashlib.sha256()
        for name in sorted(params):
            digest.update(name.encode("utf-8"))
            digest.update(params[name].data.astype("<f8").tobytes())
        return digest.hexdigest()
