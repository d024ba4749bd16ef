"""Tests for the L2,1 regularizer and the combined objective."""

import numpy as np
import pytest

from sparsehead_lab.autodiff import Tape, Tensor, gradcheck
from sparsehead_lab.errors import ConfigError, ParameterError
from sparsehead_lab.models import EncoderSpec, HeadKind, HeadSpec, encode, init_model, project, regularized_matrix
from sparsehead_lab.objectives import (
    ContrastiveBatch,
    SparsityConfig,
    SparsityMode,
    column_support,
    infonce,
    l21_norm,
    loss_components,
    total_loss,
)

W_345 = np.array([[3.0, 0.0], [4.0, 0.0]])


class TestL21:
    def test_zero_matrix(self):
        assert l21_norm(np.zeros((3, 4))).item() == 0.0

    def test_three_four_five(self):
        assert l21_norm(W_345).item() == pytest.approx(5.0)

    def test_identity(self):
        assert l21_norm(np.eye(6)).item() == pytest.approx(6.0)

    def test_homogeneous(self, rng):
        w = rng.standard_normal((4, 5))
        c = -2.7
        assert l21_norm(c * w).item() == pytest.approx(abs(c) * l21_norm(w).item())

    def test_single_column_equals_frobenius(self, rng):
        w = np.zeros((4, 3))
        w[:, 1] = rng.standard_normal(4)
        assert l21_norm(w).item() == pytest.approx(np.linalg.norm(w))


class TestColumnSupport:
    def test_zero_matrix(self):
        assert column_support(np.zeros((2, 3)), 1e-8) == frozenset()

    def test_three_four_five(self):
        assert column_support(W_345, 1e-8) == frozenset({0})

    def test_identity(self):
        assert column_support(Tensor(np.eye(4))) == frozenset(range(4))

    def test_negative_threshold(self):
        with pytest.raises(ParameterError):
            column_support(W_345, -1.0)


class TestSparsityConfig:
    def test_defaults(self):
        cfg = SparsityConfig()
        assert cfg.lam == 1e-4
        assert cfg.mode == SparsityMode.PENALTY
        assert cfg.active

    def test_mode_from_string(self):
        assert SparsityConfig(mode="proximal").mode == SparsityMode.PROXIMAL

    def test_rejects_negative_lambda(self):
        with pytest.raises(ConfigError):
            SparsityConfig(lam=-1.0)

    def test_rejects_unknown_mode(self):
        with pytest.raises(ConfigError):
            SparsityConfig(mode="ridge")


@pytest.fixture
def batch_for(rng):
    def make(model):
        x = rng.standard_normal((6, 8))
        return ContrastiveBatch(project(model, encode(model, x)))

    return make


class TestTotalLoss:
    def test_lambda_zero_is_infonce(self, linear_model, batch_for):
        batch = batch_for(linear_model)
        total = total_loss(batch, linear_model, SparsityConfig(lam=0.0))
        assert total.item() == infonce(batch).item()

    def test_adds_weighted_l21(self, linear_model, batch_for):
        w = regularized_matrix(linear_model)
        w.data[...] = 0.0
        w.data[:2, 0] = [3.0, 4.0]
        w.data[:, 1] = 1.0
        batch = batch_for(linear_model)
        total = total_loss(batch, linear_model, SparsityConfig(lam=1.0))
        expected = infonce(batch).item() + 5.0 + np.sqrt(3.0)
        assert total.item() == pytest.approx(expected)

    def test_identity_head_rejects_lambda(self, identity_model, batch_for):
        batch = batch_for(identity_model)
        with pytest.raises(ConfigError):
            total_loss(batch, identity_model, SparsityConfig(lam=0.1))

    def test_identity_head_lambda_zero(self, identity_model, batch_for):
        parts = loss_components(batch_for(identity_model), identity_model, SparsityConfig(lam=0.0))
        assert parts.regularizer.item() == 0.0
        assert parts.total is parts.infonce

    def test_proximal_mode_rejected(self, linear_model, batch_for):
        with pytest.raises(ConfigError):
            total_loss(batch_for(linear_model), linear_model, SparsityConfig(mode=SparsityMode.PROXIMAL))

    def test_proximal_components_report_untracked_regularizer(self, linear_model, batch_for):
        cfg = SparsityConfig(lam=0.5, mode=SparsityMode.PROXIMAL)
        parts = loss_components(batch_for(linear_model), linear_model, cfg)
        assert parts.total is parts.infonce
        assert not parts.regularizer.requires_grad
        assert parts.regularizer.item() == pytest.approx(0.5 * l21_norm(regularized_matrix(linear_model).data).item())
        assert set(parts.as_floats()) == {"total", "infonce", "regularizer"}

    def test_gradient_wrt_head(self, linear_model, rng):
        x = rng.standard_normal((6, 8))
        cfg = SparsityConfig(lam=0.3)
        w = regularized_matrix(linear_model)

        def fn():
            batch = ContrastiveBatch(project(linear_model, encode(linear_model, x)))
            return total_loss(batch, linear_model, cfg)

        assert gradcheck(fn, [w], coords=12).passed(1e-4)

    def test_penalty_gradient_includes_regularizer(self, linear_model, rng):
        x = rng.standard_normal((6, 8))
        w = regularized_matrix(linear_model)
        grads = {}
        for lam in (0.0, 1.0):
            linear_model.zero_grad()
            with Tape() as tape:
                batch = ContrastiveBatch(project(linear_model, encode(linear_model, x)))
                loss = total_loss(batch, linear_model, SparsityConfig(lam=lam))
            tape.backward(loss)
            grads[lam] = w.grad.copy()
        norms = np.linalg.norm(w.data, axis=0)
        assert np.allclose(grads[1.0] - grads[0.0], w.data / norms)


class TestRandomArchitectureGradients:
    @pytest.mark.parametrize("seed", range(6))
    def test_total_loss_gradcheck(self, seed):
        rng = np.random.default_rng(seed)
        input_dim = int(rng.integers(2, 9))
        hidden = tuple(int(w) for w in rng.integers(2, 17, size=int(rng.integers(0, 3))))
        d = int(rng.integers(2, 9))
        m = int(rng.integers(2, 9))
        model = init_model(
            EncoderSpec(input_dim=input_dim, hidden=hidden, output_dim=d),
            HeadSpec(HeadKind.LINEAR, input_dim=d, output_dim=m),
            seed=seed,
        )
        x = rng.standard_normal((8, input_dim))
        cfg = SparsityConfig(lam=0.2)

        def fn():
            batch = ContrastiveBatch(project(model, encode(model, x)), 0.5)
            return total_loss(batch, model, cfg)

        result = gradcheck(fn, list(model.named_parameters().values()), coords=30, seed=seed)
        assert result.passed(1e-4)
