"""Process-level configuration for the lab CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import ConfigError

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class LoggingConfig:
    """Root logger configuration."""
    level: str = "INFO"

    def __post_init__(self) -> None:
        self.level = self.level.upper()
        if self.level not in _LEVELS:
            raise ConfigError(f"Unknown log level: {self.level}")


@dataclass
class OutputConfig:
    """File names written into a run's output directory."""
    checkpoint_name: str = "checkpoint.sphd"
    metrics_name: str = "metrics.jsonl"
    spectrum_name: str = "spectrum.csv"


@dataclass
class TelemetryConfig:
    """Interactive telemetry; the metrics JSONL is always written."""
    console_enabled: bool = False
    console_format: str = "compact"  # compact | json

    def __post_init__(self) -> None:
        if self.console_format not in ("compact", "json"):
            raise ConfigError(f"Unknown console format: {self.console_format}")


@dataclass
class LabConfig:
    """Main configuration container."""
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    telemetry: TelemetryConfig = field(default_factory=TelemetryConfig)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> LabConfig:
        """Create config from dictionary."""
        try:
            return cls(
                logging=LoggingConfig(**data.get("logging", {})),
                output=OutputConfig(**data.get("output", {})),
                telemetry=TelemetryConfig(**data.get("telemetry", {})),
            )
        except TypeError as e:
            raise ConfigError(str(e)) from e

    @classmethod
    def from_yaml(cls, path: str) -> LabConfig:
        """Load config from YAML file."""
        import yaml
        with open(path) as f:
            data = yaml.safe_load(f)
        return cls.from_dict(data or {})

    @classmethod
    def from_json(cls, path: str) -> LabConfig:
        """Load config from JSON file."""
        import json
        with open(path) as f:
            data = json.load(f)
        return cls.from_dict(data)
