"""Adam with decoupled weight decay, updating parameters in place."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from ..autodiff import Tensor
from ..errors import ConfigError, ContractError, DivergenceError
from ..models import ModelState

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    """Hyperparameters plus per-parameter moment accumulators."""
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 1e-6
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ConfigError(f"Learning rate must be > 0, got {self.lr}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError(f"Betas must lie in [0, 1), got ({self.beta1}, {self.beta2})")
        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay must be >= 0, got {self.weight_decay}")


def _named(params: ModelState | Mapping[str, Tensor]) -> Mapping[str, Tensor]:
    return params.named_parameters() if isinstance(params, ModelState) else params


def adam_step(
    state: AdamState,
    params: ModelState | Mapping[str, Tensor],
    grads: Mapping[str, np.ndarray] | None = None,
    *,
    lr: float | None = None,
    no_decay: frozenset[str] = frozenset(),
) -> None:
    """
    One bias-corrected Adam update.

    Weight decay is decoupled: ``p -= lr·wd·p`` before the Adam delta, and is
    skipped for names in ``no_decay``. ``lr`` overrides ``state.lr`` for this
    step (learning-rate schedules). Gradients default to each parameter's
    ``grad`` accumulator.

    Raises:
        DivergenceError: If any gradient is NaN or infinite
        ContractError: If a gradient shape differs from its parameter
    """
    named = _named(params)
    step_lr = state.lr if lr is None else lr

    resolved: dict[str, np.ndarray] = {}
    for name, p in named.items():
        g = grads[name] if grads is not None else p.grad
        if g is None:
            continue
        if g.shape != p.shape:
            raise ContractError(f"Gradient for '{name}' has shape {g.shape}, parameter {p.shape}")
        if not np.all(np.isfinite(g)):
            raise DivergenceError(f"Non-finite gradient for '{name}'", step=state.step + 1)
        resolved[name] = g

    state.step += 1
    t = state.step
    bias1 = 1.0 - state.beta1 ** t
    bias2 = 1.0 - state.beta2 ** t

    for name, g in resolved.items():
        p = named[name]
        m = state.m.setdefault(name, np.zeros_like(p.data))
        v = state.v.setdefault(name, np.zeros_like(p.data))
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g

        if state.weight_decay and name not in no_decay:
            p.data -= step_lr * state.weight_decay * p.data

        denom = np.sqrt(v / bias2) + state.eps
        p.data -= (step_lr / bias1) * m / denom

    logger.debug(f"adam step {t}: updated {len(resolved)} tensors (lr={step_lr:.3e})")
