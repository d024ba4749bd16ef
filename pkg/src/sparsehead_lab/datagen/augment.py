"""Two-view augmentation."""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from ..errors import ContractError
from .types import AugmentationKind, AugmentationRule, Dataset, SyntheticWorld


def _latent_view(
    latents: np.ndarray,
    resample: np.ndarray,
    alpha: float,
    rng: np.random.Generator,
) -> np.ndarray:
    view = latents.copy()
    if resample.size and alpha > 0:
        noise = rng.standard_normal((latents.shape[0], resample.size))
        view[:, resample] = np.sqrt(1.0 - alpha * alpha) * latents[:, resample] + alpha * noise
    return view


def latent_views(
    latents: np.ndarray,
    world: SyntheticWorld,
    rule: AugmentationRule,
    seed: int,
    keep: Iterable[int] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Latents of the two views.

    Coordinates in ``keep`` (the world's subject set by default) are copied
    bit-for-bit; every other coordinate is mixed with fresh noise per view.
    """
    keep_set = set(world.subject if keep is None else keep)
    resample = np.array([j for j in range(world.latent_dim) if j not in keep_set], dtype=np.intp)
    rng = np.random.default_rng(seed)
    first = _latent_view(latents, resample, rule.noise_scale, rng)
    second = _latent_view(latents, resample, rule.noise_scale, rng)
    return first, second


def _pixel_view(images: np.ndarray, rule: AugmentationRule, rng: np.random.Generator) -> np.ndarray:
    n = images.shape[0]
    view = images.copy()
    flip = rng.random(n) < rule.flip_prob
    view[flip] = view[flip][..., ::-1]
    if rule.mask_fraction > 0:
        dropped = rng.random((n, 1, *images.shape[2:])) < rule.mask_fraction
        view = np.where(dropped, 0.0, view)
    if rule.noise_scale > 0:
        view = np.clip(view + rule.noise_scale * rng.standard_normal(view.shape), 0.0, 1.0)
    return view


def make_views(
    batch: Dataset,
    rule: AugmentationRule,
    seed: int,
    *,
    world: SyntheticWorld | None = None,
    support: Iterable[int] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Two augmented views of every row of ``batch`` (each n×X).

    The latent rule needs the batch's latents and the world that decodes
    them; ``support`` replaces the kept coordinate set when the rule is
    per-task. The pixel rule needs image geometry on the batch.

    Raises:
        ContractError: If the rule does not fit the data kind
    """
    if rule.kind == AugmentationKind.LATENT_NUISANCE:
        if world is None or batch.latents is None:
            raise ContractError("latent-nuisance augmentation needs a synthetic world and stored latents")
        keep = support if (rule.per_task and support is not None) else None
        first, second = latent_views(batch.latents, world, rule, seed, keep)
        return world.decode(first), world.decode(second)

    if batch.image_shape is None:
        raise ContractError("pixel augmentation needs image data (image_shape unset)")
    images = batch.features.reshape(batch.n, *batch.image_shape)
    rng = np.random.default_rng(seed)
    first = _pixel_view(images, rule, rng).reshape(batch.n, -1)
    second = _pixel_view(images, rule, rng).reshape(batch.n, -1)
    return first, second


def interleave(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Stack two view batches so rows 2i and 2i+1 are the views of sample i."""
    out = np.empty((2 * first.shape[0], first.shape[1]))
    out[0::2] = first
    out[1::2] = second
    return out
