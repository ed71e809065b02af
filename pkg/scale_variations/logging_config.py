"""
Structured logging configuration.

Provides:
- JSON-formatted logs for batch runs and log aggregators
- Run context (command, problem) attached to every record
- Keyword arguments on log calls turned into structured fields
"""

import json
import logging
import sys
from contextvars import ContextVar
from datetime import datetime, timezone
from functools import wraps
from typing import Any, Dict, Optional

# Context variables for run-scoped data
command_var: ContextVar[Optional[str]] = ContextVar("command", default=None)
problem_var: ContextVar[Optional[str]] = ContextVar("problem", default=None)


# =============================================================================
# STRUCTURED LOG FORMATTER
# =============================================================================


class StructuredFormatter(logging.Formatter):
    """
    JSON formatter that includes run context automatically.

    Output format:
    {
        "timestamp": "2026-01-15T10:30:00.000000Z",
        "level": "INFO",
        "logger": "scale_variations.variational.solver",
        "message": "Root refined",
        "command": "solve",
        "problem": "regime_a.json",
        "extra": {"T": 1.0000002}
    }
    """

    def format(self, record: logging.LogRecord) -> str:
        log_entry: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        command = command_var.get()
        if command:
            log_entry["command"] = command

        problem = problem_var.get()
        if problem:
            log_entry["problem"] = problem

        if hasattr(record, "extra_fields"):
            log_entry["extra"] = record.extra_fields

        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        # Source location for errors
        if record.levelno >= logging.ERROR:
            log_entry["location"] = {"file": record.pathname, "line": record.lineno, "function": record.funcName}

        return json.dumps(log_entry, default=str)


class DevelopmentFormatter(logging.Formatter):
    """
    Human-readable formatter for interactive use.

    Output format:
    2026-01-15 10:30:00 | INFO     | scale_variations.cli | [solve] Root refined T=1.0000002
    """

    COLORS = {
        "DEBUG": "\033[36m",  # Cyan
        "INFO": "\033[32m",  # Green
        "WARNING": "\033[33m",  # Yellow
        "ERROR": "\033[31m",  # Red
        "CRITICAL": "\033[35m",  # Magenta
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")

        color = self.COLORS.get(record.levelname, "")
        level = f"{color}{record.levelname:8}{self.RESET}"

        command = command_var.get()
        cmd_str = f"[{command}] " if command else ""

        message = record.getMessage()
        fields = getattr(record, "extra_fields", None)
        if fields:
            message += " " + " ".join(f"{key}={value}" for key, value in fields.items())

        formatted = f"{timestamp} | {level} | {record.name:20} | {cmd_str}{message}"

        if record.exc_info:
            formatted += "\n" + self.formatException(record.exc_info)

        return formatted


# =============================================================================
# CONTEXT-AWARE LOGGER
# =============================================================================


class ContextLogger(logging.LoggerAdapter):
    """
    Logger adapter that turns keyword arguments into structured fields.

    Usage:
        logger = get_logger(__name__)
        logger.info("Newton converged", iterations=3, step=1.2e-12)
    """

    def process(self, msg: str, kwargs: Dict[str, Any]) -> tuple:
        extra_fields = {}
        standard_keys = {"exc_info", "stack_info", "stacklevel", "extra"}

        for key in list(kwargs.keys()):
            if key not in standard_keys:
                extra_fields[key] = kwargs.pop(key)

        if extra_fields:
            kwargs.setdefault("extra", {})["extra_fields"] = extra_fields

        return msg, kwargs


# =============================================================================
# SETUP FUNCTIONS
# =============================================================================


def setup_logging(level: str = "INFO", json_format: bool = False) -> None:
    """
    Configure logging for a CLI run.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        json_format: Use JSON lines instead of the colored development format
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, level.upper()))

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    # stderr keeps stdout free for command output (derive prints conditions)
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(getattr(logging, level.upper()))
    handler.setFormatter(StructuredFormatter() if json_format else DevelopmentFormatter())
    root_logger.addHandler(handler)

    logger = get_logger(__name__)
    logger.debug("Logging configured", log_level=level, format="json" if json_format else "development")


def get_logger(name: str) -> ContextLogger:
    """
    Get a context-aware logger for the given module.

    Args:
        name: Logger name (typically __name__)

    Returns:
        ContextLogger instance
    """
    return ContextLogger(logging.getLogger(name), {})


# =============================================================================
# CONTEXT MANAGEMENT
# =============================================================================


def set_run_context(command: Optional[str] = None, problem: Optional[str] = None) -> None:
    """Attach the running command and problem file name to subsequent records."""
    if command:
        command_var.set(command)
    if problem:
        problem_var.set(problem)


def clear_run_context() -> None:
    """Clear all run context variables."""
    command_var.set(None)
    problem_var.set(None)


# =============================================================================
# DECORATOR FOR FUNCTION LOGGING
# =============================================================================


def log_function_call(logger: Optional[ContextLogger] = None):
    """
    Decorator to log function entry and exit at debug level.

    Usage:
        @log_function_call()
        def solve_free_T(problem):
            ...
    """

    def decorator(func):
        nonlocal logger
        if logger is None:
            logger = get_logger(func.__module__)

        @wraps(func)
        def wrapper(*args, **kwargs):
            func_name = func.__name__
            logger.debug(f"Entering {func_name}", args=str(args)[:100], kwargs=str(kwargs)[:100])
            try:
                result = func(*args, **kwargs)
                logger.debug(f"Exiting {func_name}", success=True)
                return result
            except Exception as e:
                logger.debug(f"Error in {func_name}", error=str(e))
                raise

        return wrapper

    return decorator
