"""Deterministic work splitting.

Chunk boundaries are fixed by the problem size alone, never by the worker
count, and partial results merge in chunk order; reports are therefore
byte-identical for any number of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

DEFAULT_CHUNK = 1 << 16


def thread_count(requested: int | None = None) -> int:
    if requested is not None and requested >= 1:
        return requested
    env = os.environ.get("SHADOW_ORBITS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def chunk_ranges(total: int, chunk: int = DEFAULT_CHUNK) -> list[tuple[int, int]]:
    return [(start, min(total, start + chunk)) for start in range(0, total, chunk)]


def run_chunks(fn, tasks: list, threads: int = 1) -> list:
    """Apply fn to each task; results come back in task order."""
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))
