"""Shared fixtures: tiny worlds, datasets and models that train in well under a second."""

from __future__ import annotations

import numpy as np
import pytest

from sparsehead_lab.datagen import AugmentationRule, WorldConfig, sample_dataset, sample_world
from sparsehead_lab.models import EncoderSpec, HeadKind, HeadSpec, init_model
from sparsehead_lab.objectives import SparsityMode
from sparsehead_lab.trainer import TrainConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_world_config():
    return WorldConfig(latent_dim=4, obs_dim=8, n_subject=2, n_classes=2)


@pytest.fixture
def tiny_world(tiny_world_config):
    return sample_world(tiny_world_config, seed=0)


@pytest.fixture
def tiny_dataset(tiny_world):
    return sample_dataset(tiny_world, n=64, seed=1)


@pytest.fixture
def linear_model():
    enc = EncoderSpec(input_dim=8, hidden=(16,), output_dim=4)
    return init_model(enc, HeadSpec(HeadKind.LINEAR, input_dim=4, output_dim=3), seed=0)


@pytest.fixture
def nonlinear_model():
    enc = EncoderSpec(input_dim=8, hidden=(16,), output_dim=4)
    head = HeadSpec(HeadKind.NONLINEAR, input_dim=4, output_dim=3, hidden=5, standardize=True)
    return init_model(enc, head, seed=0)


@pytest.fixture
def identity_model():
    enc = EncoderSpec(input_dim=8, hidden=(16,), output_dim=4)
    return init_model(enc, HeadSpec(HeadKind.IDENTITY, input_dim=4, output_dim=4), seed=0)


@pytest.fixture
def make_train_config():
    """Factory for small training configs on the tiny world (X=8, d=4)."""

    def make(
        head: HeadKind = HeadKind.LINEAR,
        lam: float = 0.0,
        mode: SparsityMode = SparsityMode.PENALTY,
        steps: int = 5,
        seed: int = 0,
        **overrides,
    ) -> TrainConfig:
        m = 4 if head == HeadKind.IDENTITY else 3
        fields = dict(
            encoder=EncoderSpec(input_dim=8, hidden=(16,), output_dim=4),
            head=HeadSpec(head, input_dim=4, output_dim=m),
            augmentation=AugmentationRule(noise_scale=1.0),
            batch_size=16,
            steps=steps,
            lam=lam,
            sparsity_mode=mode,
            lr=1e-2,
            seed=seed,
            eval_size=32,
        )
        fields.update(overrides)
        return TrainConfig(**fields)

    return make
