"""
Run audit trail: one JSON line per CLI command with its fully resolved
configuration and its outcome, kept in a rotating file.
"""

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any

from src.config import settings
from src.utils.logger import JSONFormatter, RunContextFilter

AUDIT_LOGGER = "regulus.audit"
MAX_BYTES = 10 * 1024 * 1024
BACKUPS = 10


def get_audit_logger(name: str = AUDIT_LOGGER, path: str | None = None) -> logging.Logger:
    """
    The run audit logger. Its rotating file handler is attached on first use
    and only when the trail is enabled; otherwise records are dropped.
    """
    logger = logging.getLogger(name)
    logger.propagate = False
    if logger.handlers:
        return logger

    logger.setLevel(logging.INFO)
    if not settings.AUDIT_LOG_ENABLED:
        logger.addHandler(logging.NullHandler())
        return logger

    target = Path(path or settings.AUDIT_LOG_PATH)
    target.parent.mkdir(parents=True, exist_ok=True)
    handler = RotatingFileHandler(target, maxBytes=MAX_BYTES, backupCount=BACKUPS, encoding="utf-8")
    handler.addFilter(RunContextFilter())
    handler.setFormatter(JSONFormatter())
    logger.addHandler(handler)
    return logger


def record_run(
    command: str,
    config: dict[str, Any],
    outcome: dict[str, Any],
    logger: logging.Logger | None = None,
) -> None:
    """Append one command run to the audit trail."""
    (logger or get_audit_logger()).info(
        f"run {command}",
        extra={"audit_data": {"command": command, "config": config, "outcome": outcome}},
    )
