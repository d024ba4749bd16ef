"""Tests for tensors and the gradient tape."""

import numpy as np
import pytest

from sparsehead_lab.autodiff import Tape, Tensor, active_tape, matmul, sum_all
from sparsehead_lab.errors import ContractError


class TestTensor:
    def test_stores_float64(self):
        t = Tensor([[1, 2], [3, 4]])
        assert t.data.dtype == np.float64
        assert t.shape == (2, 2)
        assert t.is_leaf

    def test_grad_only_when_required(self):
        assert Tensor([1.0]).grad is None
        t = Tensor([1.0, 2.0], requires_grad=True)
        assert np.array_equal(t.grad, np.zeros(2))

    def test_item_needs_single_element(self):
        assert Tensor(3.5).item() == 3.5
        with pytest.raises(ContractError):
            Tensor([1.0, 2.0]).item()

    def test_detach_copies(self):
        t = Tensor([1.0], requires_grad=True)
        d = t.detach()
        d.data[0] = 9.0
        assert t.data[0] == 1.0
        assert not d.requires_grad


class TestTape:
    def test_records_only_tracked_ops(self):
        a = Tensor([[1.0, 2.0]], requires_grad=True)
        b = Tensor([[3.0], [4.0]])
        c = Tensor([[1.0]])
        with Tape() as tape:
            out = matmul(a, b)
            matmul(c, c)
        assert len(tape) == 1
        assert tape.records[0].op == "matmul"
        assert tape.records[0].output is out

    def test_no_recording_outside_tape(self):
        a = Tensor([[1.0]], requires_grad=True)
        out = sum_all(a)
        assert out.requires_grad
        assert active_tape() is None

    def test_matmul_gradients(self):
        a = Tensor([[1.0, 2.0]], requires_grad=True)
        b = Tensor([[3.0], [4.0]], requires_grad=True)
        with Tape() as tape:
            loss = sum_all(matmul(a, b))
        tape.backward(loss)
        assert loss.item() == 11.0
        assert np.array_equal(a.grad, [[3.0, 4.0]])
        assert np.array_equal(b.grad, [[1.0], [2.0]])

    def test_gradients_accumulate(self):
        a = Tensor([2.0, 3.0], requires_grad=True)
        for _ in range(2):
            with Tape() as tape:
                loss = (a * a).sum()
            tape.backward(loss)
        assert np.allclose(a.grad, 2 * 2 * a.data)

        a.zero_grad()
        assert np.array_equal(a.grad, [0.0, 0.0])

    def test_shared_input_sums_paths(self):
        x = Tensor(3.0, requires_grad=True)
        with Tape() as tape:
            y = x * x + x
        tape.backward(y)
        assert x.grad == pytest.approx(7.0)

    def test_backward_needs_scalar(self):
        a = Tensor([1.0, 2.0], requires_grad=True)
        with Tape() as tape:
            out = a * 2.0
        with pytest.raises(ContractError, match="scalar"):
            tape.backward(out)

    def test_backward_needs_loss_from_tape(self):
        a = Tensor([1.0], requires_grad=True)
        loss = a.sum()
        with Tape() as tape:
            pass
        with pytest.raises(ContractError):
            tape.backward(loss)

    def test_nested_tapes(self):
        with Tape() as outer:
            assert active_tape() is outer
            with Tape() as inner:
                assert active_tape() is inner
            assert active_tape() is outer
        assert active_tape() is None

    def test_leaf_without_requires_grad_gets_nothing(self):
        a = Tensor([1.0, 2.0], requires_grad=True)
        b = Tensor([5.0, 7.0])
        with Tape() as tape:
            loss = (a * b).sum()
        tape.backward(loss)
        assert np.array_equal(a.grad, [5.0, 7.0])
        assert b.grad is None
