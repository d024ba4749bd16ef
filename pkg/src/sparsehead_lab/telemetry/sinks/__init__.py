"""Telemetry sinks - destinations for step events."""

from .base import RecordSink
from .console import ConsoleSink
from .file import JsonlFileSink, event_line

__all__ = [
    "RecordSink",
    "ConsoleSink",
    "JsonlFileSink",
    "event_line",
]
