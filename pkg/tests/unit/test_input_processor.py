"""Tests for config loading and trace reading."""

import json

import pytest

from sigmaz_sdf.exceptions import (
    ConfigurationError,
    InputFileNotFoundError,
    InvalidInputFormatError,
)
from sigmaz_sdf.input.processor import ConfigLoader, TraceReader

from tests.conftest import PARITY_CONFIG


@pytest.fixture
def loader() -> ConfigLoader:
    return ConfigLoader()


@pytest.fixture
def reader() -> TraceReader:
    return TraceReader()


class TestConfigLoader:
    """Test suite for ConfigLoader."""

    def test_load_toml(self, loader, parity_config_file):
        config = loader.load(parity_config_file)
        assert config.kind.value == "parity-scan"
        assert config.trap.fock_dim == 10

    def test_load_manifest(self, loader, parity_config_file, temp_dir):
        config = loader.load(parity_config_file)
        manifest = temp_dir / "parity.manifest.json"
        manifest.write_text(json.dumps({"config": config.canonical()}), encoding="utf-8")
        assert loader.load(manifest) == config

    def test_missing_file(self, loader, temp_dir):
        with pytest.raises(InputFileNotFoundError):
            loader.load(temp_dir / "absent.toml")

    def test_invalid_toml(self, loader, write_config):
        path = write_config("[experiment\nkind = ", "broken.toml")
        with pytest.raises(InvalidInputFormatError):
            loader.load(path)

    def test_json_without_config(self, loader, write_config):
        path = write_config('{"rows": []}', "other.json")
        with pytest.raises(InvalidInputFormatError):
            loader.load(path)

    def test_schema_error_names_field(self, loader, write_config):
        path = write_config(PARITY_CONFIG.replace("fock_dim = 10", "fock_dim = 1"), "bad.toml")
        with pytest.raises(ConfigurationError) as exc_info:
            loader.load(path)
        assert "trap.fock_dim" in str(exc_info.value)


class TestTraceReader:
    """Test suite for TraceReader."""

    def test_exported_trace(self, reader, write_config):
        text = (
            "# sigmaz-sdf 0.1.0\n"
            "# kind: sdf-trace\n"
            "duration_us,p_up,p_up_model\n"
            "10,0.05,0.049\n"
            "20,0.21,0.2\n"
            "30,nan,nan\n"
        )
        points = reader.read(write_config(text, "trace.csv"))
        assert len(points) == 2
        assert points[0].t == pytest.approx(10e-6)
        assert points[1].p == 0.21
        assert points[0].sigma is None

    def test_seconds_and_sigma(self, reader, write_config):
        text = "t_s,p_up,sigma\n1e-5,0.1,0.02\n2e-5,0.3,\n"
        points = reader.read(write_config(text, "trace.csv"))
        assert points[0].sigma == 0.02
        assert points[1].sigma is None
        assert points[1].t == pytest.approx(2e-5)

    def test_missing_columns(self, reader, write_config):
        with pytest.raises(InvalidInputFormatError):
            reader.read(write_config("time,prob\n1,0.1\n", "trace.csv"))

    def test_bad_row(self, reader, write_config):
        with pytest.raises(InvalidInputFormatError) as exc_info:
            reader.read(write_config("duration_us,p_up\n10,1.7\n", "trace.csv"))
        assert "row 2" in str(exc_info.value)

    def test_missing_file(self, reader, temp_dir):
        with pytest.raises(InputFileNotFoundError):
            reader.read(temp_dir / "absent.csv")
