"""Differentiable operations on :class:`Tensor`.

Each op computes its forward value with numpy, rejects non-finite results,
and registers a backward rule on the active tape. Broadcasting is limited to
scalar-with-tensor and row-vector-with-matrix.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from ..errors import DegenerateInputError, DimensionError, DomainError, NonFiniteError
from .tensor import Tensor, _note_activation, record

# Rows with a smaller Euclidean norm have no defined direction.
MIN_ROW_NORM = 1e-12


class ElementwiseKind(str, Enum):
    """Supported elementwise operations."""
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    RELU = "relu"
    EXP = "exp"
    LOG = "log"
    SCALE = "scale"

    @property
    def is_binary(self) -> bool:
        return self in (ElementwiseKind.ADD, ElementwiseKind.SUB, ElementwiseKind.MUL)


def _finite(op: str, value: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(value)):
        raise NonFiniteError(op)
    return value


def _output(op: str, value: np.ndarray, *inputs: Tensor) -> Tensor:
    return Tensor._from_op(_finite(op, value), any(t.requires_grad for t in inputs))


def _check_broadcast(a: tuple[int, ...], b: tuple[int, ...], op: str) -> None:
    if a == b or a == () or b == ():
        return
    for big, small in ((a, b), (b, a)):
        if len(big) == 2 and small in ((big[1],), (1, big[1])):
            return
    raise DimensionError(f"{op}: cannot combine shapes {a} and {b}", expected=a, actual=b)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    if shape == ():
        return np.array(grad.sum())
    if len(shape) == 1:
        return grad.sum(axis=0)
    return grad.sum(axis=0, keepdims=True)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product of ``a`` (n×k) and ``b`` (k×m)."""
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(f"matmul needs 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"matmul inner dimensions differ: {a.shape} @ {b.shape}",
            expected=a.shape[1],
            actual=b.shape[0],
        )
    out = _output("matmul", a.data @ b.data, a, b)

    def rule(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return g @ b.data.T, a.data.T @ g

    record("matmul", (a, b), out, rule)
    return out


def elementwise(
    a: Tensor,
    kind: ElementwiseKind | str,
    other: Tensor | None = None,
    *,
    factor: float | None = None,
) -> Tensor:
    """
    Apply an elementwise operation.

    Binary kinds (add, sub, mul) take ``other``; ``scale`` takes ``factor``.
    ReLU uses subgradient 0 at 0.

    Raises:
        DimensionError: If binary operand shapes cannot be combined
        DomainError: If ``log`` sees a non-positive value
    """
    kind = ElementwiseKind(kind)

    if kind.is_binary:
        if other is None:
            raise DimensionError(f"{kind.value} needs a second operand")
        _check_broadcast(a.shape, other.shape, kind.value)
        x, y = a.data, other.data
        if kind is ElementwiseKind.ADD:
            out = _output("add", x + y, a, other)

            def rule(g: np.ndarray) -> tuple[np.ndarray | None, ...]:
                return _unbroadcast(g, a.shape), _unbroadcast(g, other.shape)
        elif kind is ElementwiseKind.SUB:
            out = _output("sub", x - y, a, other)

            def rule(g: np.ndarray) -> tuple[np.ndarray | None, ...]:
                return _unbroadcast(g, a.shape), _unbroadcast(-g, other.shape)
        else:
            out = _output("mul", x * y, a, other)

            def rule(g: np.ndarray) -> tuple[np.ndarray | None, ...]:
                return _unbroadcast(g * y, a.shape), _unbroadcast(g * x, other.shape)

        record(kind.value, (a, other), out, rule)
        return out

    x = a.data
    if kind is ElementwiseKind.RELU:
        mask = x > 0
        _note_activation(mask)
        out = _output("relu", np.where(mask, x, 0.0), a)

        def unary(g: np.ndarray) -> tuple[np.ndarray | None, ...]:
            return (g * mask,)
    elif kind is ElementwiseKind.EXP:
        value = np.exp(x)
        out = _output("exp", value, a)

        def unary(g: np.ndarray) -> tuple[np.ndarray | None, ...]:
            return (g * value,)
    elif kind is ElementwiseKind.LOG:
        if np.any(x <= 0):
            raise DomainError("log of a non-positive value")
        out = _output("log", np.log(x), a)

        def unary(g: np.ndarray) -> tuple[np.ndarray | None, ...]:
            return (g / x,)
    else:
        if factor is None:
            raise DimensionError("scale needs a factor")
        c = float(factor)
        out = _output("scale", x * c, a)

        def unary(g: np.ndarray) -> tuple[np.ndarray | None, ...]:
            return (g * c,)

    record(kind.value, (a,), out, unary)
    return out


def transpose(a: Tensor) -> Tensor:
    if a.ndim != 2:
        raise DimensionError(f"transpose needs a 2-D tensor, got {a.shape}")
    out = _output("transpose", a.data.T.copy(), a)
    record("transpose", (a,), out, lambda g: (g.T,))
    return out


def sum_all(a: Tensor) -> Tensor:
    """Sum of every entry, as a scalar tensor."""
    out = _output("sum", np.array(a.data.sum()), a)
    record("sum", (a,), out, lambda g: (np.full(a.shape, float(g)),))
    return out


def take(a: Tensor, rows: np.ndarray, cols: np.ndarray) -> Tensor:
    """Gather entries ``a[rows[i], cols[i]]`` into a vector."""
    if a.ndim != 2:
        raise DimensionError(f"take needs a 2-D tensor, got {a.shape}")
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.intp)
    if rows.shape != cols.shape or rows.ndim != 1:
        raise DimensionError("take needs equal-length 1-D index arrays")
    out = _output("take", a.data[rows, cols], a)

    def rule(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros(a.shape)
        np.add.at(full, (rows, cols), g)
        return (full,)

    record("take", (a,), out, rule)
    return out


def logsumexp_rows(a: Tensor, mask: np.ndarray | None = None) -> Tensor:
    """
    Row-wise ``log(sum_j exp(a[i, j]))`` over entries where ``mask`` is True.

    Raises:
        DegenerateInputError: If some row has no included entry
    """
    if a.ndim != 2:
        raise DimensionError(f"logsumexp_rows needs a 2-D tensor, got {a.shape}")
    include = np.ones(a.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if include.shape != a.shape:
        raise DimensionError("mask shape differs from tensor shape", expected=a.shape, actual=include.shape)
    if a.shape[0] and not include.any(axis=1).all():
        raise DegenerateInputError("logsumexp over an empty row")

    x = a.data
    peak = np.where(include, x, -np.inf).max(axis=1, keepdims=True) if a.shape[0] else np.zeros((0, 1))
    weights = np.where(include, np.exp(np.where(include, x - peak, 0.0)), 0.0)
    totals = weights.sum(axis=1)
    out = _output("logsumexp", peak[:, 0] + np.log(totals), a)

    def rule(g: np.ndarray) -> tuple[np.ndarray]:
        return (g[:, None] * weights / totals[:, None],)

    record("logsumexp", (a,), out, rule)
    return out


def column_norms(w: Tensor) -> Tensor:
    """Euclidean norm of every column; the gradient is 0 at zero columns."""
    if w.ndim != 2:
        raise DimensionError(f"column_norms needs a 2-D tensor, got {w.shape}")
    norms = np.sqrt((w.data * w.data).sum(axis=0))
    out = _output("column_norms", norms, w)

    def rule(g: np.ndarray) -> tuple[np.ndarray]:
        safe = np.where(norms > 0, norms, 1.0)
        return (w.data * (g / safe)[None, :],)

    record("column_norms", (w,), out, rule)
    return out


def cosine_matrix(z: Tensor) -> Tensor:
    """
    Pairwise cosine similarities of the rows of ``z`` (n×m → n×n).

    Raises:
        DegenerateInputError: If a row has norm ≤ 1e-12
    """
    if z.ndim != 2:
        raise DimensionError(f"cosine_matrix needs a 2-D tensor, got {z.shape}")
    norms = np.sqrt((z.data * z.data).sum(axis=1))
    if np.any(norms <= MIN_ROW_NORM):
        raise DegenerateInputError("cosine of a zero-norm row")
    unit = z.data / norms[:, None]
    out = _output("cosine_matrix", unit @ unit.T, z)

    def rule(g: np.ndarray) -> tuple[np.ndarray]:
        d_unit = (g + g.T) @ unit
        radial = (d_unit * unit).sum(axis=1, keepdims=True)
        return ((d_unit - radial * unit) / norms[:, None],)

    record("cosine_matrix", (z,), out, rule)
    return out
