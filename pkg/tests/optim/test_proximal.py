"""Tests for the L2,1 proximal step."""

import numpy as np
import pytest

from sparsehead_lab.errors import ParameterError
from sparsehead_lab.autodiff import Tape
from sparsehead_lab.models import encode, project, regularized_matrix
from sparsehead_lab.objectives import ContrastiveBatch, infonce, l21_norm
from sparsehead_lab.optim import apply_prox_l21, block_soft_threshold, prox_l21


def _objective(v, w, eta):
    return 0.5 * np.sum((v - w) ** 2) + eta * l21_norm(v).item()


class TestBlockSoftThreshold:
    def test_shrinks_column(self):
        out = block_soft_threshold(np.array([[3.0], [4.0]]), 1.0)
        assert np.allclose(out, [[2.4], [3.2]])

    def test_zeroes_small_column(self):
        out = block_soft_threshold(np.array([[3.0], [4.0]]), 6.0)
        assert np.array_equal(out, [[0.0], [0.0]])

    def test_eta_zero_is_identity(self, rng):
        w = rng.standard_normal((3, 4))
        out = block_soft_threshold(w, 0.0)
        assert np.array_equal(out, w)
        assert out is not w

    def test_negative_eta(self):
        with pytest.raises(ParameterError):
            block_soft_threshold(np.ones((2, 2)), -0.1)

    def test_never_grows_columns(self, rng):
        w = rng.standard_normal((5, 6))
        out = block_soft_threshold(w, 0.8)
        assert np.all(np.linalg.norm(out, axis=0) <= np.linalg.norm(w, axis=0) + 1e-15)

    def test_exact_minimizer(self, rng):
        eta = 0.7
        for _ in range(5):
            w = rng.standard_normal((3, 3))
            best = prox_l21(w, eta).data
            # Per-column minimizer lies on the ray through the column; search its scale.
            grid = np.linspace(0.0, 1.0, 20001)
            for j in range(3):
                col = w[:, j]
                values = [0.5 * (1 - s) ** 2 * col @ col + eta * s * np.linalg.norm(col) for s in grid]
                s_star = grid[int(np.argmin(values))]
                assert np.allclose(best[:, j], s_star * col, atol=1e-4)
            assert _objective(best, w, eta) <= _objective(w, w, eta)
            perturbed = best + 1e-3 * rng.standard_normal(best.shape)
            assert _objective(best, w, eta) <= _objective(perturbed, w, eta) + 1e-12


class TestApplyProx:
    def test_updates_model_in_place(self, linear_model):
        w = regularized_matrix(linear_model)
        w.data[...] = 0.01
        w.data[:, 0] = 10.0
        zeros = apply_prox_l21(linear_model, 1.0)
        assert zeros == w.shape[1] - 1
        assert regularized_matrix(linear_model) is w
        assert np.all(w.data[:, 1:] == 0.0)
        assert np.linalg.norm(w.data[:, 0]) == pytest.approx(np.sqrt(3) * 10.0 - 1.0)


class TestProxGradientStep:
    @pytest.mark.parametrize("lam", [0.05, 0.5, 5.0])
    def test_composite_objective_does_not_increase(self, linear_model, rng, lam):
        x = rng.standard_normal((8, 8))
        w = regularized_matrix(linear_model)
        lr = 1e-4

        def composite():
            batch = ContrastiveBatch(project(linear_model, encode(linear_model, x)))
            return infonce(batch).item() + lam * l21_norm(w.data).item()

        before = composite()
        linear_model.zero_grad()
        with Tape() as tape:
            loss = infonce(ContrastiveBatch(project(linear_model, encode(linear_model, x))))
        tape.backward(loss)
        w.data[...] = block_soft_threshold(w.data - lr * w.grad, lr * lam)
        assert composite() <= before + 1e-12
