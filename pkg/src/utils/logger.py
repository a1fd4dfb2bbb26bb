"""
Structured logging for the lab. Records go to stderr; stdout is reserved
for command output.

A run context (command, seed) is bound once per CLI command and stamped on
every record emitted while it is active, including records from the audit
trail.
"""

import sys
import json
import logging
from contextlib import contextmanager
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any, Iterator, Optional

from src.config import settings

_run_context: ContextVar[dict[str, Any]] = ContextVar("regulus_run", default={})

# LogRecord attributes copied verbatim into the JSON payload when present
PAYLOAD_ATTRS = ("context", "audit_data")


@contextmanager
def bind_run(**fields: Any) -> Iterator[None]:
    """Attach `fields` (command, seed, ...) to every record logged inside the block."""
    token = _run_context.set({**_run_context.get(), **fields})
    try:
        yield
    finally:
        _run_context.reset(token)


class RunContextFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        record.run = _run_context.get()
        return True


class JSONFormatter(logging.Formatter):
    """One JSON object per record."""

    def format(self, record: logging.LogRecord) -> str:
        entry: dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        run = getattr(record, "run", None)
        if run:
            entry["run"] = run
        for attr in PAYLOAD_ATTRS:
            if hasattr(record, attr):
                entry[attr] = getattr(record, attr)
        if record.exc_info and record.exc_info[0]:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


def setup_logger(name: str = "regulus", level: Optional[str] = None) -> logging.Logger:
    """
    Configure the lab logger: JSON lines on stderr, or a compact text
    format when DEBUG is set. Idempotent.
    """
    logger = logging.getLogger(name)
    log_level = (level or settings.LOG_LEVEL).upper()
    logger.setLevel(log_level)

    if logger.hasHandlers():
        return logger

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(log_level)
    handler.addFilter(RunContextFilter())
    if settings.DEBUG:
        handler.setFormatter(
            logging.Formatter(
                fmt="%(asctime)s %(levelname)-7s %(name)s [%(run)s] %(message)s",
                datefmt="%H:%M:%S",
            )
        )
    else:
        handler.setFormatter(JSONFormatter())
    logger.addHandler(handler)
    return logger


logger = setup_logger()
