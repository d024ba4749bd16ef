"""Training telemetry - step events and their sinks."""

from .events import StepEvent
from .sinks import ConsoleSink, JsonlFileSink, RecordSink, event_line

__all__ = [
    "StepEvent",
    "RecordSink",
    "JsonlFileSink",
    "ConsoleSink",
    "event_line",
]
