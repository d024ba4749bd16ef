"""
Shared encoder with one sparse linear head per world task.

Each step draws a task, builds views that keep the task's support and
resample every other latent, and minimizes that task's objective

    InfoNCE / 2N  +  λ·‖W^t‖_{2,1}

The encoder is updated on every step; a head only when its task is drawn.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..autodiff import Tape, Tensor, matmul
from ..datagen import AugmentationKind, Dataset, SyntheticWorld, interleave, make_views
from ..errors import ConfigError, DegenerateInputError, DivergenceError, InsufficientDataError, NonFiniteError
from ..models import HeadKind, HeadSpec, ModelState, encode, init_model, init_task_heads
from ..objectives import ContrastiveBatch, SparsityMode, column_support, infonce, l21_norm
from ..optim import AdamState, adam_step, block_soft_threshold, learning_rate
from .types import TrainConfig

logger = logging.getLogger(__name__)

_STREAM_HEADS = 5
_STREAM_BATCHES = 6
_STREAM_VIEWS = 7
_STREAM_TASKS = 8


@dataclass
class TaskHeadRun:
    """
    ``model`` carries the trained encoder behind an identity head, so
    ``embed`` returns its representations. ``heads[t]`` belongs to
    ``world.tasks[t]``.
    """
    model: ModelState
    heads: list[Tensor]
    objective: list[float] = field(default_factory=list)
    task_draws: list[int] = field(default_factory=list)

    def head_supports(self, threshold: float) -> list[frozenset[int]]:
        return [column_support(w, threshold) for w in self.heads]


def _check(config: TrainConfig, dataset: Dataset, world: SyntheticWorld) -> None:
    if not world.tasks:
        raise ConfigError("Task-head training needs a world with sampled tasks (n_tasks > 0)")
    if config.head.kind != HeadKind.LINEAR:
        raise ConfigError(f"Task heads are linear, got a {config.head.kind.value} head")
    if config.augmentation.kind != AugmentationKind.LATENT_NUISANCE or not config.augmentation.per_task:
        raise ConfigError("Task-head training needs per_task latent-nuisance augmentation")
    if dataset.latents is None:
        raise ConfigError("Task-head training needs a dataset with stored latents")
    if dataset.n < config.batch_size:
        raise InsufficientDataError(f"dataset has {dataset.n} rows, batch size is {config.batch_size}")
    if dataset.dim != config.encoder.input_dim:
        raise ConfigError(f"encoder input_dim {config.encoder.input_dim} != dataset dim {dataset.dim}")


def train_task_heads(config: TrainConfig, dataset: Dataset, world: SyntheticWorld) -> TaskHeadRun:
    """
    Train the encoder against per-task heads.

    Penalty mode differentiates the λ term; proximal mode differentiates the
    InfoNCE term only and block-soft-thresholds the drawn head with
    η = lr·λ afterwards.

    Raises:
        ConfigError: If the config, world or dataset do not fit task-head training
        InsufficientDataError: If the dataset has fewer rows than the batch size
        DivergenceError: On a non-finite loss or gradient, or a collapsed head
    """
    _check(config, dataset, world)
    seed = config.seed
    sparsity = config.sparsity
    d = config.encoder.output_dim

    model = init_model(config.encoder, HeadSpec(HeadKind.IDENTITY, d, d), seed)
    heads = init_task_heads(config.head, len(world.tasks), int(np.random.default_rng((seed, _STREAM_HEADS)).integers(2**31)))
    encoder_adam = AdamState(lr=config.lr, weight_decay=config.weight_decay)
    head_adam = [AdamState(lr=config.lr, weight_decay=config.weight_decay) for _ in heads]
    proximal = sparsity.mode == SparsityMode.PROXIMAL

    batch_rng = np.random.default_rng((seed, _STREAM_BATCHES))
    view_rng = np.random.default_rng((seed, _STREAM_VIEWS))
    task_rng = np.random.default_rng((seed, _STREAM_TASKS))
    run = TaskHeadRun(model=model, heads=heads)
    scale = 1.0 / (2 * config.batch_size)

    logger.info(
        f"Training encoder with {len(heads)} task heads for {config.steps} steps "
        f"(lambda={config.lam}, mode={sparsity.mode.value}, seed={seed})"
    )
    for step in range(1, config.steps + 1):
        lr_t = learning_rate(config.lr, step - 1, config.steps, config.lr_schedule)
        t = int(task_rng.integers(len(heads)))
        batch = dataset.subset(batch_rng.choice(dataset.n, size=config.batch_size, replace=False))
        first, second = make_views(
            batch, config.augmentation, int(view_rng.integers(2**31)), world=world, support=world.tasks[t].support
        )
        head = heads[t]

        try:
            model.zero_grad()
            head.zero_grad()
            with Tape() as tape:
                z = matmul(encode(model, interleave(first, second), training=True), head.T)
                objective = infonce(ContrastiveBatch(z, config.temperature)).scale(scale)
                if sparsity.active and not proximal:
                    objective = objective + l21_norm(head).scale(sparsity.lam)
            tape.backward(objective)
            adam_step(encoder_adam, model.encoder_parameters(), lr=lr_t)
            adam_step(head_adam[t], {"head": head}, lr=lr_t)
        except (NonFiniteError, DivergenceError, DegenerateInputError) as e:
            raise DivergenceError(f"Task-head training diverged at step {step}: {e}", step=step) from e

        if proximal and sparsity.active:
            head.data[...] = block_soft_threshold(head.data, lr_t * sparsity.lam)

        value = objective.item()
        if proximal:
            value += sparsity.lam * l21_norm(head.detach()).item()
        run.objective.append(value)
        run.task_draws.append(t)
        if step % config.diagnostics_interval == 0 or step == config.steps:
            logger.info(f"step {step}/{config.steps}: task={t} objective={value:.4f}")

    return run
