"""Dense float64 tensors and the define-by-run gradient tape."""

from __future__ import annotations

import threading
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import ContractError

# Maps the gradient of an op's output to one gradient per input (None = no flow).
BackwardRule = Callable[[np.ndarray], tuple[np.ndarray | None, ...]]

_local = threading.local()


def _tape_stack() -> list[Tape]:
    stack: list[Tape] | None = getattr(_local, "tapes", None)
    if stack is None:
        stack = []
        _local.tapes = stack
    return stack


def active_tape() -> Tape | None:
    """The innermost tape entered on this thread, or None."""
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tensor:
    """
    A dense row-major array of 64-bit floats.

    Leaves created by the user may set ``requires_grad``; their ``grad`` is an
    accumulator of the same shape that backward passes add into. Tensors
    produced by operations are non-leaves.
    """

    __slots__ = ("data", "requires_grad", "name", "_grad", "_is_leaf")

    def __init__(self, data: Any, requires_grad: bool = False, *, name: str | None = None):
        self.data: np.ndarray = np.array(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.name = name
        self._grad: np.ndarray | None = None
        self._is_leaf = True

    @classmethod
    def _from_op(cls, data: np.ndarray, requires_grad: bool) -> Tensor:
        out = cls.__new__(cls)
        out.data = data
        out.requires_grad = requires_grad
        out.name = None
        out._grad = None
        out._is_leaf = False
        return out

    @classmethod
    def zeros(cls, shape: tuple[int, ...], requires_grad: bool = False) -> Tensor:
        return cls(np.zeros(shape), requires_grad=requires_grad)

    # -- structure -------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return int(self.data.ndim)

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return self._is_leaf

    @property
    def grad(self) -> np.ndarray | None:
        """Gradient accumulator; present iff ``requires_grad``."""
        if not self.requires_grad:
            return None
        if self._grad is None:
            self._grad = np.zeros_like(self.data)
        return self._grad

    def zero_grad(self) -> None:
        if self.requires_grad:
            self._grad = np.zeros_like(self.data)

    def _accumulate(self, grad: np.ndarray) -> None:
        if self._grad is None:
            self._grad = np.array(grad, dtype=np.float64).reshape(self.data.shape)
        else:
            self._grad += grad

    def detach(self) -> Tensor:
        """A gradient-free copy of this tensor's values."""
        return Tensor(self.data.copy())

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(()))

    def __len__(self) -> int:
        return int(self.data.shape[0]) if self.data.ndim else 1

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"

    # -- operator sugar (implemented in ops) ------------------------------

    def __add__(self, other: Any) -> Tensor:
        from .ops import elementwise
        return elementwise(self, "add", _as_tensor(other))

    def __radd__(self, other: Any) -> Tensor:
        from .ops import elementwise
        return elementwise(_as_tensor(other), "add", self)

    def __sub__(self, other: Any) -> Tensor:
        from .ops import elementwise
        return elementwise(self, "sub", _as_tensor(other))

    def __rsub__(self, other: Any) -> Tensor:
        from .ops import elementwise
        return elementwise(_as_tensor(other), "sub", self)

    def __mul__(self, other: Any) -> Tensor:
        from .ops import elementwise
        if isinstance(other, (int, float)):
            return elementwise(self, "scale", factor=float(other))
        return elementwise(self, "mul", _as_tensor(other))

    def __rmul__(self, other: Any) -> Tensor:
        return self.__mul__(other)

    def __truediv__(self, other: float) -> Tensor:
        from .ops import elementwise
        return elementwise(self, "scale", factor=1.0 / float(other))

    def __neg__(self) -> Tensor:
        from .ops import elementwise
        return elementwise(self, "scale", factor=-1.0)

    def __matmul__(self, other: Tensor) -> Tensor:
        from .ops import matmul
        return matmul(self, other)

    def relu(self) -> Tensor:
        from .ops import elementwise
        return elementwise(self, "relu")

    def exp(self) -> Tensor:
        from .ops import elementwise
        return elementwise(self, "exp")

    def log(self) -> Tensor:
        from .ops import elementwise
        return elementwise(self, "log")

    def scale(self, factor: float) -> Tensor:
        from .ops import elementwise
        return elementwise(self, "scale", factor=factor)

    def sum(self) -> Tensor:
        from .ops import sum_all
        return sum_all(self)

    @property
    def T(self) -> Tensor:  # noqa: N802
        from .ops import transpose
        return transpose(self)


def _as_tensor(value: Any) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def as_tensor(value: Any) -> Tensor:
    """Wrap arrays and scalars; tensors pass through unchanged."""
    return _as_tensor(value)


@dataclass(frozen=True, slots=True)
class TapeRecord:
    """One recorded operation."""
    op: str
    inputs: tuple[Tensor, ...]
    output: Tensor
    rule: BackwardRule


class Tape:
    """
    Ordered log of differentiable operations (define-by-run).

    Use as a context manager; operations executed inside the ``with`` block
    whose inputs require gradients are appended in execution order, which is
    a topological order by construction. A tape belongs to one thread.

        with Tape() as tape:
            loss = infonce(batch)
        tape.backward(loss)
    """

    def __init__(self) -> None:
        self._records: list[TapeRecord] = []
        self._outputs: set[int] = set()

    def __enter__(self) -> Tape:
        _tape_stack().append(self)
        return self

    def __exit__(self, *exc: object) -> None:
        stack = _tape_stack()
        if not stack or stack[-1] is not self:
            raise ContractError("Tape contexts exited out of order")
        stack.pop()

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> tuple[TapeRecord, ...]:
        return tuple(self._records)

    def record(self, op: str, inputs: tuple[Tensor, ...], output: Tensor, rule: BackwardRule) -> None:
        self._records.append(TapeRecord(op, inputs, output, rule))
        self._outputs.add(id(output))

    def backward(self, loss: Tensor) -> None:
        backward(loss, self)


def record(op: str, inputs: tuple[Tensor, ...], output: Tensor, rule: BackwardRule) -> None:
    """Record an op on the active tape when its output participates in gradients."""
    if not output.requires_grad:
        return
    tape = active_tape()
    if tape is not None:
        tape.record(op, inputs, output, rule)


def backward(loss: Tensor, tape: Tape) -> None:
    """
    Reverse-mode pass over ``tape`` seeded with d(loss)/d(loss) = 1.

    Every leaf with ``requires_grad`` that the loss depends on receives its
    gradient added into ``grad``; calling again without ``zero_grad``
    accumulates.

    Raises:
        ContractError: If the loss is not a scalar or was not produced on this tape
    """
    if loss.ndim != 0:
        raise ContractError(f"backward() needs a scalar loss, got shape {loss.shape}")
    if id(loss) not in tape._outputs:
        raise ContractError("Loss was not produced through this tape")

    pending: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for rec in reversed(tape._records):
        grad_out = pending.pop(id(rec.output), None)
        if grad_out is None:
            continue
        for inp, grad_in in zip(rec.inputs, rec.rule(grad_out)):
            if grad_in is None or not inp.requires_grad:
                continue
            if inp.is_leaf:
                inp._accumulate(grad_in)
            else:
                key = id(inp)
                pending[key] = pending[key] + grad_in if key in pending else grad_in


# -- activation-pattern capture (used by the finite-difference checker) -----

@contextmanager
def capture_activation_patterns() -> Iterator[list[bytes]]:
    """Collect the ReLU on/off pattern of every relu evaluated in the block."""
    previous = getattr(_local, "patterns", None)
    patterns: list[bytes] = []
    _local.patterns = patterns
    try:
        yield patterns
    finally:
        _local.patterns = previous


def _note_activation(mask: np.ndarray) -> None:
    patterns: list[bytes] | None = getattr(_local, "patterns", None)
    if patterns is not None:
        patterns.append(np.packbits(mask, axis=None).tobytes())
