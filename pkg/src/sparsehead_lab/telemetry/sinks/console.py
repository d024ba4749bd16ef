"""Console sink for interactive runs."""

from __future__ import annotations

import sys
from collections.abc import Sequence
from dataclasses import dataclass

from ..events import StepEvent
from .base import RecordSink
from .file import event_line


@dataclass
class ConsoleSink(RecordSink):
    """Prints events to stdout or stderr as JSON or a one-line summary."""
    stream: str = "stderr"  # stdout | stderr
    format: str = "compact"  # json | compact
    prefix: str = "[train] "

    def send(self, events: Sequence[StepEvent]) -> None:
        out = sys.stdout if self.stream == "stdout" else sys.stderr
        for event in events:
            print(f"{self.prefix}{self._format_event(event)}", file=out)

    def _format_event(self, event: StepEvent) -> str:
        if self.format == "json":
            return event_line(event)
        return (
            f"step={event.step} "
            f"infonce={event.loss_infonce:.4f} "
            f"reg={event.loss_reg:.4g} "
            f"active={event.active_cols} "
            f"erank_r={event.erank_r:.2f} "
            f"erank_z={event.erank_z:.2f} "
            f"lr={event.lr:.2e}"
        )
