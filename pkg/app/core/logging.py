"""Structured logging setup and key-value report blocks."""

import json
import logging
import sys
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, Mapping, Optional, TextIO

import numpy as np

from app.core.config import settings


def _json_value(value: Any) -> Any:
    # numpy scalars and arrays from report fields, paths and enums
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


class StructuredFormatter(logging.Formatter):
    """JSON formatter: one object per line with the report fields inlined.

    Fields passed as ``extra={"extra_fields": {...}}`` are merged into the
    object; numpy values become plain JSON numbers and lists.
    """

    def format(self, record: logging.LogRecord) -> str:
        """
        Format log record as JSON.

        Args:
            record: Log record

        Returns:
            JSON string
        """
        log_data: Dict[str, Any] = {
            "timestamp": self.formatTime(record, self.datefmt),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        extra_fields = getattr(record, "extra_fields", None)
        if extra_fields:
            log_data.update(extra_fields)

        return json.dumps(log_data, default=_json_value)


def setup_logging(
    log_level: Optional[str] = None,
    log_file: Optional[str] = None,
    use_json: Optional[bool] = None,
) -> None:
    """
    Configure application logging with structured output.

    Console output goes to standard error so that standard output stays
    available for data.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional path to log file
        use_json: Whether to use JSON formatting (defaults to settings.log_json)
    """
    level = getattr(logging, (log_level or settings.log_level).upper(), logging.INFO)
    if use_json is None:
        use_json = settings.log_json

    if use_json:
        formatter: logging.Formatter = StructuredFormatter()
    else:
        formatter = logging.Formatter(
            fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if log_file:
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5,
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    # Third-party numerical libraries are noisy at DEBUG
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("numexpr").setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance for a module.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)


def format_value(value: Any) -> str:
    """Render one report value; floats keep 17 significant digits."""
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def format_key_values(fields: Mapping[str, Any]) -> str:
    """
    Render a report as a ``key=value`` block, one pair per line.

    Args:
        fields: Ordered report fields

    Returns:
        Text block ending with a newline
    """
    return "".join(f"{key}={format_value(value)}\n" for key, value in fields.items())


def emit_report_block(
    title: str, fields: Mapping[str, Any], stream: Optional[TextIO] = None
) -> None:
    """
    Write a titled key-value block to standard error (or ``stream``).

    Args:
        title: Block title, written as a ``[title]`` header
        fields: Report fields
        stream: Target stream (standard error by default)
    """
    target = stream or sys.stderr
    target.write(f"[{title}]\n")
    target.write(format_key_values(fields))
    target.flush()


def log_report(
    logger: logging.Logger,
    title: str,
    fields: Mapping[str, Any],
    level: int = logging.INFO,
) -> None:
    """
    Log a report with its fields attached as structured extras.

    Args:
        logger: Logger instance
        title: Report title
        fields: Report fields
        level: Logging level
    """
    summary = ", ".join(f"{key}={format_value(value)}" for key, value in fields.items())
    logger.log(
        level,
        f"{title}: {summary}",
        extra={"extra_fields": {"report": title, **dict(fields)}},
    )
