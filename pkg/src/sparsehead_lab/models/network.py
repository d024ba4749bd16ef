"""Model construction and forward passes."""

from __future__ import annotations

import logging

import numpy as np

from ..autodiff import Tensor, as_tensor, matmul
from ..errors import DimensionError, SpecError, UnsupportedError
from .types import AffineLayer, EncoderSpec, HeadKind, HeadSpec, ModelState, RunningStats

logger = logging.getLogger(__name__)


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))


def _affine(rng: np.random.Generator, fan_in: int, fan_out: int, bias: bool = True) -> AffineLayer:
    return AffineLayer(
        weight=Tensor(_glorot(rng, fan_in, fan_out), requires_grad=True),
        bias=Tensor(np.zeros(fan_out), requires_grad=True) if bias else None,
    )


def init_model(enc: EncoderSpec, head: HeadSpec, seed: int) -> ModelState:
    """
    Build a model with Glorot-uniform weights and zero biases.

    Raises:
        SpecError: If the specs are inconsistent
    """
    if head.input_dim != enc.output_dim:
        raise SpecError(
            f"Head input_dim {head.input_dim} != encoder output_dim {enc.output_dim}"
        )

    rng = np.random.default_rng(seed)
    encoder = [_affine(rng, fan_in, fan_out) for fan_in, fan_out in enc.layer_dims]

    layers: list[AffineLayer] = []
    stats = None
    if head.kind == HeadKind.LINEAR:
        layers = [_affine(rng, head.input_dim, head.output_dim, bias=False)]
    elif head.kind == HeadKind.NONLINEAR:
        width = head.hidden_width
        layers = [
            _affine(rng, head.input_dim, width),
            _affine(rng, width, head.output_dim),
        ]
        if head.standardize:
            stats = RunningStats(mean=np.zeros(width), var=np.ones(width))

    model = ModelState(enc, head, encoder, layers, stats)
    logger.debug(
        f"Initialized model: encoder {enc.layer_dims}, head {head.kind.value}, "
        f"{model.parameter_count} parameters (seed={seed})"
    )
    return model


def init_task_heads(head: HeadSpec, count: int, seed: int) -> list[Tensor]:
    """
    ``count`` independent linear head matrices (m × d), Glorot-uniform.

    Raises:
        SpecError: If ``head`` is not linear or ``count`` < 1
    """
    if head.kind != HeadKind.LINEAR:
        raise SpecError(f"Task heads are linear, got a {head.kind.value} head spec")
    if count < 1:
        raise SpecError(f"Need at least one task head, got {count}")
    rng = np.random.default_rng(seed)
    return [Tensor(_glorot(rng, head.input_dim, head.output_dim), requires_grad=True) for _ in range(count)]


def _apply(layer: AffineLayer, x: Tensor) -> Tensor:
    out = matmul(x, layer.weight.T)
    return out + layer.bias if layer.bias is not None else out


def encode(model: ModelState, x: Tensor | np.ndarray, *, training: bool = False) -> Tensor:
    """Representations r = f(x) for a batch of rows."""
    x = as_tensor(x)
    spec = model.encoder_spec
    if x.ndim != 2 or x.shape[1] != spec.input_dim:
        raise DimensionError(
            f"encode expects (n, {spec.input_dim}) input, got {x.shape}",
            expected=spec.input_dim,
            actual=x.shape,
        )
    h = x
    last = len(model.encoder) - 1
    for i, layer in enumerate(model.encoder):
        h = _apply(layer, h)
        if i < last:
            h = h.relu()
    return h


def _standardize(h: Tensor, stats: RunningStats, training: bool) -> Tensor:
    if training:
        stats.update(h.data)
    mean = Tensor(stats.mean)
    inv_std = Tensor(1.0 / np.sqrt(stats.var + stats.eps))
    return (h - mean) * inv_std


def project(model: ModelState, r: Tensor, *, training: bool = False) -> Tensor:
    """Embeddings z = h(r); the identity head returns ``r`` itself."""
    r = as_tensor(r)
    spec = model.head_spec
    if r.ndim != 2 or r.shape[1] != spec.input_dim:
        raise DimensionError(
            f"project expects (n, {spec.input_dim}) input, got {r.shape}",
            expected=spec.input_dim,
            actual=r.shape,
        )
    if spec.kind == HeadKind.IDENTITY:
        return r
    if spec.kind == HeadKind.LINEAR:
        return _apply(model.head[0], r)

    hidden = _apply(model.head[0], r)
    if model.head_stats is not None:
        hidden = _standardize(hidden, model.head_stats, training)
    return _apply(model.head[1], hidden.relu())


def regularized_matrix(model: ModelState) -> Tensor:
    """
    The head matrix SparseHead penalizes (m × k, columns = input features).

    Linear head: W itself. Nonlinear head: the last layer's weight matrix.
    The returned tensor aliases the live parameter.

    Raises:
        UnsupportedError: For the identity head
    """
    if model.head_spec.kind == HeadKind.IDENTITY:
        raise UnsupportedError("Identity head has no regularized matrix")
    return model.head[-1].weight
