"""
Logging configuration for the Entropic Chaos Degree toolkit
"""

import logging
import sys
from pathlib import Path
from typing import Optional

from pythonjsonlogger import jsonlogger

from src.config import settings


def setup_logging(
    level: Optional[str] = None,
    json_format: Optional[bool] = None,
    log_file: Optional[str] = None
) -> logging.Logger:
    """
    Configure toolkit logging with JSON formatting on stderr

    Args:
        level: Log level name, defaults to settings.LOG_LEVEL
        json_format: Emit JSON records, defaults to settings.LOG_JSON
        log_file: Optional file for persistent logs, defaults to settings.LOG_FILE

    Returns:
        The configured root logger
    """
    level = level or settings.LOG_LEVEL
    json_format = settings.LOG_JSON if json_format is None else json_format
    log_file = settings.LOG_FILE if log_file is None else log_file

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, level.upper()))

    # Remove existing handlers
    root_logger.handlers = []

    # stdout carries command output
    console_handler = logging.StreamHandler(sys.stderr)
    if json_format:
        console_formatter = jsonlogger.JsonFormatter(
            "%(asctime)s %(name)s %(levelname)s %(message)s",
            timestamp=True
        )
    else:
        console_formatter = logging.Formatter("%(levelname)s %(name)s: %(message)s")
    console_handler.setFormatter(console_formatter)
    root_logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path)
        file_formatter = jsonlogger.JsonFormatter(
            "%(asctime)s %(name)s %(levelname)s %(pathname)s %(funcName)s %(lineno)d %(message)s",
            timestamp=True
        )
        file_handler.setFormatter(file_formatter)
        root_logger.addHandler(file_handler)

    # Set third-party loggers to WARNING
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("PIL").setLevel(logging.WARNING)

    return root_logger
