"""Tests for process-level configuration."""

import json

import pytest

from sparsehead_lab.config import LabConfig, LoggingConfig, TelemetryConfig
from sparsehead_lab.errors import ConfigError


class TestLabConfig:
    def test_defaults(self):
        config = LabConfig()
        assert config.logging.level == "INFO"
        assert config.output.metrics_name == "metrics.jsonl"
        assert not config.telemetry.console_enabled

    def test_from_dict(self):
        config = LabConfig.from_dict({"logging": {"level": "debug"}, "output": {"spectrum_name": "s.csv"}})
        assert config.logging.level == "DEBUG"
        assert config.output.spectrum_name == "s.csv"

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            LabConfig.from_dict({"output": {"plot_name": "x.png"}})

    def test_bad_level(self):
        with pytest.raises(ConfigError):
            LoggingConfig(level="chatty")

    def test_bad_console_format(self):
        with pytest.raises(ConfigError):
            TelemetryConfig(console_format="xml")

    def test_from_yaml(self, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text("telemetry:\n  console_enabled: true\n  console_format: json\n")
        config = LabConfig.from_yaml(str(path))
        assert config.telemetry.console_enabled
        assert config.telemetry.console_format == "json"

    def test_empty_yaml(self, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text("")
        assert LabConfig.from_yaml(str(path)) == LabConfig()

    def test_from_json(self, tmp_path):
        path = tmp_path / "lab.json"
        path.write_text(json.dumps({"output": {"checkpoint_name": "model.sphd"}}))
        assert LabConfig.from_json(str(path)).output.checkpoint_name == "model.sphd"
