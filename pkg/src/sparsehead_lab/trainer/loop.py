"""The contrastive training loop."""

from __future__ import annotations

import logging
import time
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from ..analysis import MinMaxStats, SpectrumReport, minmax_stats, spectrum_report
from ..autodiff import Tape
from ..datagen import Dataset, SyntheticWorld, interleave, make_views
from ..errors import ConfigError, DegenerateInputError, DivergenceError, InsufficientDataError, NonFiniteError
from ..models import HeadKind, ModelState, encode, init_model, project, regularized_matrix
from ..objectives import ContrastiveBatch, SparsityMode, column_support, loss_components
from ..optim import AdamState, adam_step, apply_prox_l21, learning_rate
from ..telemetry import RecordSink, StepEvent
from .types import RunRecord, StepRecord, TrainConfig

logger = logging.getLogger(__name__)

_STREAM_EVAL = 1
_STREAM_BATCHES = 2
_STREAM_VIEWS = 3
_STREAM_TASKS = 4


@dataclass(frozen=True)
class Diagnostics:
    spectrum: SpectrumReport
    minmax: MinMaxStats | None  # None when every embedding coincides


def _features(eval_set: Dataset | np.ndarray) -> np.ndarray:
    return eval_set.features if isinstance(eval_set, Dataset) else np.asarray(eval_set, dtype=np.float64)


def embed(model: ModelState, features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Representations and embeddings of ``features`` in inference mode."""
    r = encode(model, features)
    z = project(model, r)
    return r.data.copy(), z.data.copy()


def snapshot_diagnostics(model: ModelState, eval_set: Dataset | np.ndarray) -> Diagnostics:
    """
    Spectra of representations and embeddings plus min-max statistics of
    the embeddings, computed on a deep copy of ``model``.

    Raises:
        DegenerateInputError: If ``eval_set`` is empty
    """
    features = _features(eval_set)
    if features.shape[0] == 0:
        raise DegenerateInputError("snapshot_diagnostics needs a nonempty eval set")
    r, z = embed(model.snapshot(), features)
    try:
        minmax: MinMaxStats | None = minmax_stats(z)
    except DegenerateInputError:
        logger.warning("Every embedding coincides; min-max statistics skipped")
        minmax = None
    return Diagnostics(spectrum=spectrum_report(r, z), minmax=minmax)


def active_columns(model: ModelState, threshold: float) -> int:
    """Nonzero columns of the regularized matrix; the identity head reports d."""
    if model.head_spec.kind == HeadKind.IDENTITY:
        return model.representation_dim
    return len(column_support(regularized_matrix(model), threshold))


def _batches(n: int, batch_size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    """Consecutive chunks of a fresh permutation per epoch; the ragged tail is dropped."""
    while True:
        order = rng.permutation(n)
        for start in range(0, n - batch_size + 1, batch_size):
            yield order[start:start + batch_size]


def diagnostic_indices(n: int, eval_size: int, seed: int) -> np.ndarray:
    """A fixed seeded subsample of the training rows, used for diagnostics."""
    return np.random.default_rng((seed, _STREAM_EVAL)).permutation(n)[:min(eval_size, n)]


def train(
    config: TrainConfig,
    dataset: Dataset,
    *,
    world: SyntheticWorld | None = None,
    sinks: Sequence[RecordSink] = (),
) -> tuple[ModelState, RunRecord]:
    """
    Train encoder and head with InfoNCE and SparseHead.

    Each step samples a mini-batch without replacement (reshuffled per
    epoch), builds two views, and updates with Adam. Penalty mode
    differentiates InfoNCE + λ·L2,1; proximal mode differentiates InfoNCE and
    then block-soft-thresholds the regularized matrix with η = lr·λ.
    Diagnostics run every ``config.diagnostics_interval`` steps and on the
    last step, on ``config.eval_size`` training rows fixed by the seed; they
    track training-set geometry, not held-out performance.

    Raises:
        ConfigError: If the config does not fit the dataset
        InsufficientDataError: If the dataset has fewer rows than the batch size
        DivergenceError: On a non-finite loss or gradient; carries the partial record
    """
    if dataset.n < config.batch_size:
        raise InsufficientDataError(f"dataset has {dataset.n} rows, batch size is {config.batch_size}")
    if dataset.dim != config.encoder.input_dim:
        raise ConfigError(f"encoder input_dim {config.encoder.input_dim} != dataset dim {dataset.dim}")

    seed = config.seed
    sparsity = config.sparsity
    model = init_model(config.encoder, config.head, seed)
    adam = AdamState(lr=config.lr, weight_decay=config.weight_decay)
    record = RunRecord(config_hash=config.config_hash())

    proximal = sparsity.mode == SparsityMode.PROXIMAL and config.head.kind != HeadKind.IDENTITY
    no_decay = frozenset({model.regularized_name()}) if proximal and sparsity.active else frozenset()
    tasks = world.tasks if (world is not None and config.augmentation.per_task) else []

    diag_rows = dataset.features[diagnostic_indices(dataset.n, config.eval_size, seed)]
    batches = _batches(dataset.n, config.batch_size, np.random.default_rng((seed, _STREAM_BATCHES)))
    view_rng = np.random.default_rng((seed, _STREAM_VIEWS))
    task_rng = np.random.default_rng((seed, _STREAM_TASKS))
    interval = config.diagnostics_interval

    logger.info(
        f"Training {config.head.kind.value} head for {config.steps} steps "
        f"(N={config.batch_size}, lambda={config.lam}, mode={sparsity.mode.value}, seed={seed})"
    )
    started = time.perf_counter()
    for sink in sinks:
        sink.start()
    try:
        for step in range(1, config.steps + 1):
            lr_t = learning_rate(config.lr, step - 1, config.steps, config.lr_schedule)
            batch = dataset.subset(next(batches))
            support = tasks[int(task_rng.integers(len(tasks)))].support if tasks else None
            first, second = make_views(
                batch, config.augmentation, int(view_rng.integers(2**31)), world=world, support=support
            )
            x = interleave(first, second)

            try:
                model.zero_grad()
                with Tape() as tape:
                    z = project(model, encode(model, x, training=True), training=True)
                    parts = loss_components(ContrastiveBatch(z, config.temperature), model, sparsity)
                tape.backward(parts.total)
                adam_step(adam, model, lr=lr_t, no_decay=no_decay)
            except (NonFiniteError, DivergenceError, DegenerateInputError) as e:
                # Zero embedding rows mean the head collapsed (e.g. every column pruned).
                raise DivergenceError(f"Training diverged at step {step}: {e}", step=step, record=record) from e

            if proximal:
                apply_prox_l21(model, lr_t * sparsity.lam)

            losses = parts.as_floats()
            objective = losses["infonce"] + losses["regularizer"]
            record.steps.append(StepRecord(step, losses["infonce"], losses["regularizer"], objective, lr_t))
            logger.debug(f"step {step}: infonce={losses['infonce']:.6f} reg={losses['regularizer']:.6g}")

            if step % interval == 0 or step == config.steps:
                diag = snapshot_diagnostics(model, diag_rows)
                summary = diag.spectrum.summary()
                event = StepEvent(
                    step=step,
                    loss_infonce=losses["infonce"],
                    loss_infonce_mean=losses["infonce"] / (2 * config.batch_size),
                    loss_reg=losses["regularizer"],
                    active_cols=active_columns(model, sparsity.zero_threshold),
                    erank_r=summary["erank_r"],
                    erank_z=summary["erank_z"],
                    lr=lr_t,
                )
                record.events.append(event)
                record.spectra.append({"step": step, **summary, "minmax_mean": diag.minmax.mean if diag.minmax else None})
                for sink in sinks:
                    sink.send([event])
                logger.info(
                    f"step {step}/{config.steps}: infonce={event.loss_infonce:.4f} "
                    f"active_cols={event.active_cols} erank_r={event.erank_r:.2f} erank_z={event.erank_z:.2f}"
                )
    finally:
        record.wall_clock_seconds = time.perf_counter() - started
        for sink in sinks:
            sink.stop()

    logger.info(f"Training finished in {record.wall_clock_seconds:.1f}s")
    return model, record
