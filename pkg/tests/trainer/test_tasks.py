"""Tests for training a shared encoder against per-task sparse heads."""

import numpy as np
import pytest

from sparsehead_lab.datagen import AugmentationRule, WorldConfig, sample_dataset, sample_world
from sparsehead_lab.errors import ConfigError, InsufficientDataError
from sparsehead_lab.models import HeadKind
from sparsehead_lab.objectives import SparsityMode
from sparsehead_lab.trainer import embed, train_task_heads


@pytest.fixture
def task_world():
    return sample_world(WorldConfig(latent_dim=4, obs_dim=8, n_subject=2, n_tasks=4, support_max=2), seed=0)


@pytest.fixture
def task_dataset(task_world):
    return sample_dataset(task_world, n=64, seed=1)


@pytest.fixture
def task_config(make_train_config):
    def make(head=HeadKind.LINEAR, **overrides):
        overrides.setdefault("augmentation", AugmentationRule(noise_scale=1.0, per_task=True))
        overrides.setdefault("steps", 10)
        return make_train_config(head=head, **overrides)

    return make


class TestTrainTaskHeads:
    def test_one_head_per_task(self, task_config, task_world, task_dataset):
        run = train_task_heads(task_config(lam=0.05), task_dataset, task_world)
        assert len(run.heads) == 4
        assert all(w.shape == (3, 4) for w in run.heads)
        assert len(run.objective) == 10
        assert len(run.task_draws) == 10
        assert all(0 <= t < 4 for t in run.task_draws)
        r, z = embed(run.model, task_dataset.features)
        assert r.shape == (64, 4)
        assert np.array_equal(r, z)

    def test_only_drawn_heads_move(self, task_config, task_world, task_dataset):
        config = task_config(steps=2)
        run = train_task_heads(config, task_dataset, task_world)
        fresh = train_task_heads(task_config(steps=1, lr=1e-12), task_dataset, task_world)
        untouched = set(range(4)) - set(run.task_draws)
        for t in untouched:
            assert np.allclose(run.heads[t].data, fresh.heads[t].data)

    def test_replay_is_identical(self, task_config, task_world, task_dataset):
        a = train_task_heads(task_config(lam=0.05), task_dataset, task_world)
        b = train_task_heads(task_config(lam=0.05), task_dataset, task_world)
        assert a.model.checksum() == b.model.checksum()
        assert a.objective == b.objective
        assert all(np.array_equal(x.data, y.data) for x, y in zip(a.heads, b.heads))

    def test_proximal_prunes_only_the_drawn_head(self, task_config, task_world, task_dataset):
        run = train_task_heads(task_config(lam=1000.0, mode=SparsityMode.PROXIMAL, steps=1), task_dataset, task_world)
        drawn = run.task_draws[0]
        supports = run.head_supports(1e-12)
        assert supports[drawn] == frozenset()
        assert all(supports[t] == frozenset(range(4)) for t in range(4) if t != drawn)

    def test_penalty_objective_decreases(self, task_config, task_world, task_dataset):
        run = train_task_heads(task_config(lam=0.05, steps=80), task_dataset, task_world)
        assert np.mean(run.objective[-10:]) < np.mean(run.objective[:10])

    def test_needs_tasks(self, task_config, tiny_world, tiny_dataset):
        with pytest.raises(ConfigError):
            train_task_heads(task_config(), tiny_dataset, tiny_world)

    def test_needs_per_task_views(self, task_config, task_world, task_dataset):
        with pytest.raises(ConfigError):
            train_task_heads(task_config(augmentation=AugmentationRule()), task_dataset, task_world)

    def test_needs_linear_head(self, task_config, task_world, task_dataset):
        with pytest.raises(ConfigError):
            train_task_heads(task_config(head=HeadKind.NONLINEAR), task_dataset, task_world)

    def test_too_few_rows(self, task_config, task_world):
        with pytest.raises(InsufficientDataError):
            train_task_heads(task_config(), sample_dataset(task_world, n=10, seed=0), task_world)
