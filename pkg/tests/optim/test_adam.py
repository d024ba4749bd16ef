"""Tests for the Adam optimizer and learning-rate schedules."""

import math

import numpy as np
import pytest

from sparsehead_lab.autodiff import Tensor
from sparsehead_lab.errors import ConfigError, ContractError, DivergenceError
from sparsehead_lab.optim import AdamState, LRSchedule, adam_step, learning_rate


@pytest.fixture
def param():
    return {"w": Tensor([1.0], requires_grad=True)}


class TestAdamStep:
    def test_first_step_moves_by_lr(self, param):
        state = AdamState(lr=0.1, weight_decay=0.0)
        adam_step(state, param, {"w": np.array([0.5])})
        assert param["w"].data[0] == pytest.approx(0.9, rel=1e-6)
        assert state.step == 1

    def test_first_step_sign(self, param):
        state = AdamState(lr=0.1, weight_decay=0.0)
        adam_step(state, param, {"w": np.array([-3.0])})
        assert param["w"].data[0] == pytest.approx(1.1, rel=1e-6)

    def test_zero_gradient_is_fixed_point(self, param):
        state = AdamState(lr=0.1, weight_decay=0.0)
        for _ in range(3):
            adam_step(state, param, {"w": np.array([0.0])})
        assert param["w"].data[0] == 1.0

    def test_decoupled_weight_decay(self, param):
        state = AdamState(lr=0.1, weight_decay=0.1)
        adam_step(state, param, {"w": np.array([0.5])})
        assert param["w"].data[0] == pytest.approx(0.99 - 0.1, rel=1e-6)

    def test_no_decay(self, param):
        state = AdamState(lr=0.1, weight_decay=0.1)
        adam_step(state, param, {"w": np.array([0.5])}, no_decay=frozenset({"w"}))
        assert param["w"].data[0] == pytest.approx(0.9, rel=1e-6)

    def test_lr_override(self, param):
        state = AdamState(lr=0.1, weight_decay=0.0)
        adam_step(state, param, {"w": np.array([0.5])}, lr=0.01)
        assert param["w"].data[0] == pytest.approx(0.99, rel=1e-6)

    def test_uses_grad_accumulators(self, linear_model):
        for t in linear_model.named_parameters().values():
            t.grad[...] = 1.0
        before = {k: v.data.copy() for k, v in linear_model.named_parameters().items()}
        adam_step(AdamState(lr=0.01, weight_decay=0.0), linear_model)
        for name, t in linear_model.named_parameters().items():
            assert np.allclose(t.data, before[name] - 0.01, atol=1e-8)

    def test_nan_gradient_diverges(self, param):
        state = AdamState()
        with pytest.raises(DivergenceError):
            adam_step(state, param, {"w": np.array([np.nan])})
        assert param["w"].data[0] == 1.0
        assert state.step == 0

    def test_shape_mismatch(self, param):
        with pytest.raises(ContractError):
            adam_step(AdamState(), param, {"w": np.array([1.0, 2.0])})

    def test_deterministic(self, rng):
        grads = [rng.standard_normal(3) for _ in range(5)]
        results = []
        for _ in range(2):
            p = {"w": Tensor(np.ones(3), requires_grad=True)}
            state = AdamState(lr=0.05)
            for g in grads:
                adam_step(state, p, {"w": g})
            results.append(p["w"].data.tobytes())
        assert results[0] == results[1]

    def test_rejects_bad_hyperparameters(self):
        with pytest.raises(ConfigError):
            AdamState(lr=0.0)
        with pytest.raises(ConfigError):
            AdamState(beta1=1.0)
        with pytest.raises(ConfigError):
            AdamState(weight_decay=-1e-3)


class TestLearningRate:
    def test_constant(self):
        assert learning_rate(1e-3, 7, 10, LRSchedule.CONSTANT) == 1e-3

    def test_cosine(self):
        assert learning_rate(1.0, 0, 10, "cosine") == pytest.approx(1.0)
        assert learning_rate(1.0, 5, 10, "cosine") == pytest.approx(0.5)
        assert learning_rate(1.0, 9, 10, "cosine") == pytest.approx(0.5 * (1 + math.cos(0.9 * math.pi)))

    def test_out_of_range(self):
        with pytest.raises(ConfigError):
            learning_rate(1.0, 10, 10, "constant")
