"""
CSV / JSON emission and parsing for harness records.

Every float leaves at FLOAT_DIGITS significant digits. A CSV document
starts with one `# config: {...}` line holding the resolved configuration;
a JSON document carries it under "config". Both parse back into the
emitting record type with model_validate.
"""

from __future__ import annotations

import csv
import io
import json
import math
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, TypeVar

from pydantic import BaseModel

from src.config import settings

CONFIG_PREFIX = "# config: "

Record = TypeVar("Record", bound=BaseModel)


def fmt_float(x: float) -> str:
    return f"{x:.{settings.FLOAT_DIGITS}g}"


def plain(value: Any) -> Any:
    """JSON-ready copy with floats rounded to FLOAT_DIGITS and rationals as 'a/b'."""
    if isinstance(value, BaseModel):
        return plain(value.model_dump(by_alias=True))
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return str(value)
        return float(fmt_float(value))
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return plain(value.item())
    return str(value)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


def to_csv(records: Iterable[BaseModel], fields: list[str], config: dict[str, Any]) -> str:
    buffer = io.StringIO()
    buffer.write(CONFIG_PREFIX + json.dumps(plain(config), sort_keys=True) + "\n")
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for record in records:
        row = record.model_dump(by_alias=True)
        writer.writerow({f: _cell(row.get(f)) for f in fields})
    return buffer.getvalue()


def from_csv(text: str, model: type[Record]) -> tuple[dict[str, Any], list[Record]]:
    """Inverse of to_csv: (config, records)."""
    lines = text.splitlines()
    config: dict[str, Any] = {}
    if lines and lines[0].startswith(CONFIG_PREFIX):
        config = json.loads(lines[0][len(CONFIG_PREFIX) :])
        lines = lines[1:]
    rows = csv.DictReader(lines)
    return config, [model.model_validate(row) for row in rows]


def to_json(payload: Any, config: dict[str, Any]) -> str:
    body = plain(payload)
    if not isinstance(body, dict):
        body = {"records": body}
    return json.dumps({"config": plain(config), **body}, indent=2, sort_keys=True) + "\n"


def from_json(text: str, model: type[Record]) -> tuple[dict[str, Any], list[Record]]:
    """Inverse of to_json for one record or a list under "records"."""
    data = json.loads(text)
    config = data.pop("config", {})
    if "records" in data:
        return config, [model.model_validate(r) for r in data["records"]]
    return config, [model.model_validate(data)]
