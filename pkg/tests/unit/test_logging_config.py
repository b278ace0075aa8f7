"""
Test cases for logging configuration
"""

import logging
from io import StringIO
from unittest.mock import patch

import pytest

from entropy_lab.logging_config import (
    LOGGER_NAME,
    NO_RUN,
    get_logger,
    set_run_context,
    setup_logging,
)


class TestSetupLogging:
    """Test setup_logging function"""

    def test_setup_logging_defaults(self):
        """Test setup_logging with default parameters"""
        logger = setup_logging()

        assert logger.name == LOGGER_NAME == "entropy_lab"
        assert logger.level == logging.INFO
        assert len(logger.handlers) == 1
        assert isinstance(logger.handlers[0], logging.StreamHandler)
        assert not logger.propagate

    def test_setup_logging_custom_level(self):
        """Test setup_logging with a lowercase level name"""
        logger = setup_logging(level="debug")

        assert logger.level == logging.DEBUG
        assert logger.handlers[0].level == logging.DEBUG

    def test_setup_logging_timestamp_toggle(self):
        """Test the console format with and without timestamps"""
        assert "%(asctime)s" in setup_logging().handlers[0].formatter._fmt
        logger = setup_logging(include_timestamp=False)
        assert logger.handlers[0].formatter._fmt == "%(levelname)s [%(run)s] %(message)s"

    def test_setup_logging_file_handler(self, tmp_path):
        """Test the rotating file handler, its directory and rotation settings"""
        log_file = tmp_path / "runs" / "lab.log"

        logger = setup_logging(
            log_file=str(log_file), include_timestamp=False, max_bytes=2048, backup_count=2
        )
        logger.info("scan finished")

        handler_types = [type(h).__name__ for h in logger.handlers]
        assert handler_types == ["StreamHandler", "RotatingFileHandler"]
        file_handler = logger.handlers[1]
        assert file_handler.maxBytes == 2048
        assert file_handler.backupCount == 2
        # the file always carries timestamps
        assert "%(asctime)s" in file_handler.formatter._fmt
        assert "scan finished" in log_file.read_text()

    def test_setup_logging_removes_existing_handlers(self):
        """Test that repeated setup replaces handlers"""
        first = setup_logging()
        second = setup_logging()

        assert first is second
        assert len(second.handlers) == 1

    def test_setup_logging_invalid_level(self):
        """Test setup_logging with invalid log level"""
        with pytest.raises(AttributeError):
            setup_logging(level="LOUD")


class TestGetLogger:
    """Test get_logger function"""

    def test_get_logger_default_name(self):
        """Test get_logger with default name"""
        assert get_logger().name == "entropy_lab"

    def test_module_loggers_are_children(self):
        """Test module loggers sit below the package logger"""
        setup_logging()
        child = get_logger("entropy_lab.inequalities.nash")

        assert child.parent is logging.getLogger(LOGGER_NAME)
        assert get_logger("entropy_lab.inequalities.nash") is child


class TestLoggingIntegration:
    """Integration tests for logging functionality"""

    def test_console_goes_to_stderr(self):
        """Test that console logging never touches stdout"""
        with (
            patch("sys.stdout", new_callable=StringIO) as mock_stdout,
            patch("sys.stderr", new_callable=StringIO) as mock_stderr,
        ):
            logger = setup_logging(level="INFO", include_timestamp=False)
            get_logger("entropy_lab.cli").info("wrote 5 rows")

        assert mock_stdout.getvalue() == ""
        assert "INFO [-] wrote 5 rows" in mock_stderr.getvalue()
        assert logger.handlers[0].stream is mock_stderr

    def test_log_level_filtering(self):
        """Test that log level filtering works correctly"""
        with patch("sys.stderr", new_callable=StringIO) as mock_stderr:
            logger = setup_logging(level="WARNING", include_timestamp=False)

            logger.debug("Debug message")
            logger.info("Info message")
            logger.warning("Warning message")
            logger.error("Error message")

        output = mock_stderr.getvalue()
        assert "Debug message" not in output
        assert "Info message" not in output
        assert "Warning message" in output
        assert "Error message" in output


class TestRunContext:
    """Test the run context stamped on every line"""

    def teardown_method(self):
        set_run_context()

    def test_context_strings(self):
        """Test the context text for command, command with seed, and none"""
        assert set_run_context("constants") == "constants"
        assert set_run_context("nash-scan", 0) == "nash-scan seed=0"
        assert set_run_context() == NO_RUN

    def test_context_reaches_console_and_file(self, tmp_path):
        """Test both handlers show the active run and the reset marker"""
        log_file = tmp_path / "lab.log"
        with patch("sys.stderr", new_callable=StringIO) as mock_stderr:
            logger = setup_logging(include_timestamp=False, log_file=str(log_file))
            set_run_context("nash-scan", 7)
            logger.info("scan started")
            set_run_context()
            logger.info("idle")

        output = mock_stderr.getvalue()
        assert "INFO [nash-scan seed=7] scan started" in output
        assert "INFO [-] idle" in output
        assert "[nash-scan seed=7] scan started" in log_file.read_text()

    def test_main_resets_context(self):
        """Test the entry point clears the context when a run ends"""
        from entropy_lab.cli import EXIT_OK, main

        assert main(["constants", "--n", "3", "--p", "2", "--output", "-"]) == EXIT_OK
        with patch("sys.stderr", new_callable=StringIO) as mock_stderr:
            setup_logging(include_timestamp=False)
            get_logger("entropy_lab.cli").info("after")
        assert "[-] after" in mock_stderr.getvalue()
