"""
Logging configuration for entropy-lab

Every line carries the run context (``nash-scan seed=0``), so logs of
several experiments written to one file stay attributable.
"""

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

LOGGER_NAME = "entropy_lab"
NO_RUN = "-"

CONSOLE_FORMAT = "%(levelname)s [%(run)s] %(message)s"
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s [%(run)s] %(message)s"


class RunContextFilter(logging.Filter):
    """Stamps records with the ``run`` attribute used by the formats."""

    def __init__(self, context: str = NO_RUN) -> None:
        super().__init__()
        self.context = context

    def filter(self, record: logging.LogRecord) -> bool:
        record.run = self.context
        return True


_RUN_CONTEXT = RunContextFilter()


def set_run_context(command: str | None = None, seed: int | None = None) -> str:
    """Set the context shown on every log line; no arguments clears it."""
    if command is None:
        context = NO_RUN
    else:
        context = command if seed is None else f"{command} seed={seed}"
    _RUN_CONTEXT.context = context
    return context


def setup_logging(
    level: str = "INFO",
    include_timestamp: bool = True,
    log_file: str | None = None,
    max_bytes: int = 10 * 1024 * 1024,  # 10MB
    backup_count: int = 5,
) -> logging.Logger:
    """
    Set up logging for experiment runs

    Console output goes to stderr so that ``--output -`` keeps stdout
    reserved for report rows.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        include_timestamp: Whether console lines start with a timestamp
        log_file: Path to a rotating log file (if None, only console logging)
        max_bytes: Maximum size of log file before rotation
        backup_count: Number of backup files to keep

    Returns:
        Configured package logger

    Raises:
        AttributeError: If ``level`` is not a logging level name
    """
    numeric_level = getattr(logging, level.upper())
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(numeric_level)

    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    console_format = f"%(asctime)s - {CONSOLE_FORMAT}" if include_timestamp else CONSOLE_FORMAT
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    formats = [console_format]

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(
            RotatingFileHandler(log_file, maxBytes=max_bytes, backupCount=backup_count)
        )
        formats.append(FILE_FORMAT)

    for handler, fmt in zip(handlers, formats, strict=True):
        handler.setLevel(numeric_level)
        handler.setFormatter(logging.Formatter(fmt))
        handler.addFilter(_RUN_CONTEXT)
        logger.addHandler(handler)

    logger.propagate = False

    return logger


def get_logger(name: str = LOGGER_NAME) -> logging.Logger:
    """
    Get a logger instance

    Args:
        name: Logger name (defaults to entropy_lab)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)
