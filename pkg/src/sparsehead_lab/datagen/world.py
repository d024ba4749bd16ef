"""Sampling synthetic worlds and datasets from them."""

from __future__ import annotations

import logging

import numpy as np

from ..errors import SpecError
from .tasks import sample_task_heads, sample_task_supports
from .types import MAX_CONDITION, Dataset, MixingKind, SyntheticWorld, WorldConfig

logger = logging.getLogger(__name__)

MAX_MIXING_ATTEMPTS = 1000

# Independent random streams derived from one seed.
_STREAM_MIXING = 0
_STREAM_SUBJECT = 1
_STREAM_PROTOTYPES = 2
_STREAM_SUPPORTS = 3
_STREAM_HEADS = 4


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng((seed, stream))


def _well_conditioned(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    for _ in range(MAX_MIXING_ATTEMPTS):
        a = rng.standard_normal((rows, cols)) / np.sqrt(cols)
        if np.linalg.cond(a) < MAX_CONDITION:
            return a
    raise SpecError(f"Could not draw a {rows}x{cols} mixing matrix with condition < {MAX_CONDITION}")


def sample_world(config: WorldConfig, seed: int) -> SyntheticWorld:
    """
    Draw a world deterministically from ``seed``.

    Raises:
        SpecError: If the config cannot be realized (e.g. d* > X with linear mixing)
    """
    d, x_dim = config.latent_dim, config.obs_dim

    mix_rng = _rng(seed, _STREAM_MIXING)
    mixing = decoder = None
    if config.mixing == MixingKind.LINEAR:
        mixing = _well_conditioned(mix_rng, x_dim, d)
    else:
        hidden = config.mlp_hidden if config.mlp_hidden is not None else max(d, x_dim)
        decoder = (_well_conditioned(mix_rng, hidden, d), mix_rng.standard_normal((x_dim, hidden)) / np.sqrt(hidden))

    subject = tuple(sorted(int(j) for j in _rng(seed, _STREAM_SUBJECT).choice(d, config.n_subject, replace=False)))
    nuisance = tuple(j for j in range(d) if j not in subject)
    prototypes = _rng(seed, _STREAM_PROTOTYPES).standard_normal((config.n_classes, len(subject)))

    tasks = []
    if config.n_tasks:
        supports = sample_task_supports(
            d, config.n_tasks, config.support_min, config.support_upper, seed=int(_rng(seed, _STREAM_SUPPORTS).integers(2**31))
        )
        tasks = sample_task_heads(supports, config.task_head_dim, d, seed=int(_rng(seed, _STREAM_HEADS).integers(2**31)))

    world = SyntheticWorld(
        config=config,
        seed=seed,
        subject=subject,
        nuisance=nuisance,
        prototypes=prototypes,
        mixing=mixing,
        decoder=decoder,
        tasks=tasks,
    )
    logger.info(
        f"Sampled {config.mixing.value} world d*={d} X={x_dim} "
        f"subject={list(subject)} tasks={len(tasks)} (seed={seed})"
    )
    return world


def sample_dataset(world: SyntheticWorld, n: int, seed: int) -> Dataset:
    """
    ``n`` unit-Gaussian latents, their observations and class labels.

    The class of a sample is the prototype with the largest inner product
    with its subject latents.
    """
    if n < 0:
        raise SpecError(f"n must be >= 0, got {n}")
    latents = np.random.default_rng(seed).standard_normal((n, world.latent_dim))
    return Dataset(
        features=world.decode(latents),
        labels=world.label(latents),
        n_classes=world.config.n_classes,
        latents=latents,
    )
