"""Line-per-step CSV dump of a trace, for debugging."""

from __future__ import annotations

import csv
from pathlib import Path

from src.exploration.process import ExplorationTrace, HitClass

TRACE_CSV_FIELDS = ["t", "e", "h", "class", "R", "active", "fresh"]


def dump_trace(trace: ExplorationTrace, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_CSV_FIELDS)
        for i in range(trace.steps):
            writer.writerow(
                [
                    i + 1,
                    int(trace.e[i]),
                    int(trace.h[i]),
                    HitClass(int(trace.hit_class[i])).name,
                    int(bool(trace.retained[i])),
                    int(trace.active_after[i]),
                    int(trace.fresh_after[i]),
                ]
            )
