"""Combined contrastive objective with the SparseHead regularizer."""

from __future__ import annotations

from dataclasses import dataclass

from ..autodiff import Tensor
from ..errors import ConfigError
from ..models import HeadKind, ModelState, regularized_matrix
from .contrastive import ContrastiveBatch, infonce
from .sparsity import SparsityConfig, SparsityMode, l21_norm


@dataclass(frozen=True)
class LossBreakdown:
    """
    ``total`` is what gets differentiated.

    In proximal mode (and whenever λ = 0) ``total`` is the InfoNCE tensor
    itself and ``regularizer`` is an untracked value for reporting.
    """
    total: Tensor
    infonce: Tensor
    regularizer: Tensor

    def as_floats(self) -> dict[str, float]:
        return {
            "total": self.total.item(),
            "infonce": self.infonce.item(),
            "regularizer": self.regularizer.item(),
        }


def _check_head(model: ModelState, cfg: SparsityConfig) -> None:
    if model.head_spec.kind == HeadKind.IDENTITY and cfg.lam > 0:
        raise ConfigError("Identity head has no matrix to regularize; lambda must be 0")


def loss_components(batch: ContrastiveBatch, model: ModelState, cfg: SparsityConfig) -> LossBreakdown:
    """
    InfoNCE, the λ-weighted L2,1 term and their differentiable total.

    Raises:
        ConfigError: If λ > 0 with the identity head
    """
    _check_head(model, cfg)
    contrastive = infonce(batch)

    if model.head_spec.kind == HeadKind.IDENTITY:
        return LossBreakdown(contrastive, contrastive, Tensor(0.0))

    if cfg.mode == SparsityMode.PENALTY and cfg.active:
        reg = l21_norm(regularized_matrix(model)).scale(cfg.lam)
        return LossBreakdown(contrastive + reg, contrastive, reg)

    reg_value = cfg.lam * l21_norm(regularized_matrix(model).detach()).item()
    return LossBreakdown(contrastive, contrastive, Tensor(reg_value))


def total_loss(batch: ContrastiveBatch, model: ModelState, cfg: SparsityConfig) -> Tensor:
    """
    infonce + λ·l21(regularized matrix), for penalty mode.

    Raises:
        ConfigError: In proximal mode, where the optimizer applies the term
    """
    if cfg.mode != SparsityMode.PENALTY:
        raise ConfigError("total_loss is only defined in penalty mode; proximal mode regularizes in the optimizer")
    return loss_components(batch, model, cfg).total
