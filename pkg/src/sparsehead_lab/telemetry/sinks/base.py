"""Base sink interface."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence

from ..events import StepEvent


class RecordSink(ABC):
    """
    Destination for step events (file, console, ...).

    The trainer calls ``start`` before the first step, ``send`` on every
    logged step and ``stop`` when training ends, also on failure.
    """

    @abstractmethod
    def send(self, events: Sequence[StepEvent]) -> None:
        ...

    def start(self) -> None:
        """Open resources (called before training)."""
        pass

    def stop(self) -> None:
        """Release resources (called after training)."""
        pass
