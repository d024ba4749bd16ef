"""JSONL file sink."""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

from ..events import StepEvent
from .base import RecordSink


def event_line(event: StepEvent) -> str:
    """One compact JSON object; floats keep full round-trip precision."""
    return json.dumps(event.to_dict(), separators=(",", ":"))


@dataclass
class JsonlFileSink(RecordSink):
    """
    Writes one JSON object per line.

    The file is truncated on ``start`` so a rerun replaces the previous
    trace rather than appending to it.
    """
    path: str
    encoding: str = "utf-8"

    _file: IO[str] | None = field(default=None, init=False, repr=False)

    def start(self) -> None:
        Path(self.path).parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self.path, "w", encoding=self.encoding, newline="\n")

    def stop(self) -> None:
        if self._file:
            self._file.close()
            self._file = None

    def send(self, events: Sequence[StepEvent]) -> None:
        if not self._file:
            self.start()
        assert self._file is not None
        for event in events:
            self._file.write(event_line(event) + "\n")
        self._file.flush()
