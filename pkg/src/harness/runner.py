"""
Chunked trial execution over a process pool.

Trial i always draws from RandomStream(seed, i), so a chunk's result is a
pure function of (job, lo, hi). Chunks are merged by elementwise integer
addition, which is associative and commutative: the totals do not depend
on the worker count or on completion order.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Sequence

from src.config import settings
from src.utils.metrics import TRIAL_BATCH_DURATION

ChunkFn = Callable[[Any, int, int], Sequence[int]]

_CHUNKS_PER_WORKER = 4


def resolve_threads(threads: int | None = None) -> int:
    if threads is not None and threads < 1:
        raise ValueError("threads must be >= 1")
    return threads or settings.THREADS or os.cpu_count() or 1


def chunk_bounds(trials: int, workers: int) -> list[tuple[int, int]]:
    """Contiguous [lo, hi) ranges covering 0..trials."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pieces = min(trials, max(1, workers * _CHUNKS_PER_WORKER))
    step, extra = divmod(trials, pieces)
    bounds, lo = [], 0
    for k in range(pieces):
        hi = lo + step + (1 if k < extra else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def _timed(fn: ChunkFn, job: Any, lo: int, hi: int) -> tuple[tuple[int, ...], float]:
    started = time.perf_counter()
    counts = tuple(fn(job, lo, hi))
    return counts, time.perf_counter() - started


def run_trials(fn: ChunkFn, job: Any, trials: int, threads: int | None = None) -> tuple[int, ...]:
    """Sum fn(job, lo, hi) over all chunks; inline when one worker is requested."""
    workers = resolve_threads(threads)
    bounds = chunk_bounds(trials, workers)
    totals: list[int] | None = None

    def merge(counts: tuple[int, ...], elapsed: float) -> None:
        nonlocal totals
        TRIAL_BATCH_DURATION.observe(elapsed)
        totals = list(counts) if totals is None else [a + b for a, b in zip(totals, counts)]

    if workers == 1 or len(bounds) == 1:
        for lo, hi in bounds:
            merge(*_timed(fn, job, lo, hi))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_timed, fn, job, lo, hi) for lo, hi in bounds]
            for future in futures:
                merge(*future.result())
    return tuple(totals)
