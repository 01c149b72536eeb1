"""
Tests for logging utilities.
"""

import logging
import sys
from unittest.mock import patch

from structlog.processors import JSONRenderer

from sigmaz_sdf.base import BaseComponent, BaseProcessor
from sigmaz_sdf.utils.logging import setup_logging


class TestStructuredLogging:
    """Test structured logging setup."""

    def test_configures_structlog(self):
        with patch("structlog.configure") as mock_configure:
            setup_logging(level="INFO")

            mock_configure.assert_called_once()
            call_args = mock_configure.call_args
            assert "processors" in call_args.kwargs
            assert "logger_factory" in call_args.kwargs
            assert call_args.kwargs["cache_logger_on_first_use"] is True

    def test_logs_to_stderr_by_default(self):
        with patch("logging.basicConfig") as mock_basic_config, patch("structlog.configure"):
            setup_logging(level="WARNING")

            call_args = mock_basic_config.call_args
            assert call_args.kwargs["stream"] is sys.stderr
            assert call_args.kwargs["level"] == logging.WARNING

    def test_debug_flag_wins_over_level(self):
        with patch("logging.basicConfig") as mock_basic_config, patch("structlog.configure"):
            setup_logging(level="ERROR", debug=True)

            assert mock_basic_config.call_args.kwargs["level"] == logging.DEBUG

    def test_unknown_level_falls_back_to_info(self):
        with patch("logging.basicConfig") as mock_basic_config, patch("structlog.configure"):
            setup_logging(level="chatty")

            assert mock_basic_config.call_args.kwargs["level"] == logging.INFO

    def test_file_output(self, temp_dir):
        log_file = temp_dir / "sweep.log"
        with patch("logging.basicConfig") as mock_basic_config, patch("structlog.configure"):
            setup_logging(level="INFO", file_path=str(log_file))

            assert mock_basic_config.call_args.kwargs["filename"] == str(log_file)

    def test_json_renderer(self):
        with patch("structlog.configure") as mock_configure:
            setup_logging(json_logs=True)

            processors = mock_configure.call_args.kwargs["processors"]
            assert isinstance(processors[-1], JSONRenderer)

    def test_component_binding(self):
        logger = setup_logging(level="WARNING", component="sweep_engine")
        assert logger is not None


class TestBaseComponents:
    """Test logging helpers shared by components."""

    def test_log_helpers_accept_context(self):
        component = BaseComponent("runner")
        component.log_operation("Run", kind="parity-scan")
        component.log_success("Run", rows=8)
        component.log_error("Run", ValueError("bad"), kind="parity-scan")
        assert component.component_name == "runner"

    def test_processor_stats(self):
        processor = BaseProcessor("engine")
        processor.start_clock()
        processor.processed_count = 4
        processor.error_count = 1
        processor.stop_clock()
        stats = processor.get_stats()
        assert stats["processed"] == 4
        assert stats["success_rate"] == 75.0
        assert stats["elapsed_seconds"] >= 0.0

    def test_processor_stats_before_start(self):
        stats = BaseProcessor("engine").get_stats()
        assert stats["elapsed_seconds"] == 0.0
        assert stats["success_rate"] == 0
