"""Chunked thread-pool evaluation over flat point arrays."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

ENV_VAR = "ENVELOPE_TOOL_THREADS"
CHUNK = 4096


def thread_count() -> int:
    raw = os.environ.get(ENV_VAR, "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def map_points(fn, u: np.ndarray, v: np.ndarray, threads: int | None = None):
    """Apply ``fn(u_chunk, v_chunk) -> dict of arrays`` and concatenate in order.

    Results never depend on the thread count: every chunk is evaluated
    independently and reassembled in input order.
    """
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    bounds = list(range(0, len(u), CHUNK)) + [len(u)]
    pieces = [(u[a:b], v[a:b]) for a, b in zip(bounds[:-1], bounds[1:])] or [(u, v)]
    n = min(threads or thread_count(), len(pieces))
    if n <= 1:
        results = [fn(a, b) for a, b in pieces]
    else:
        with ThreadPoolExecutor(max_workers=n) as ex:
            results = list(ex.map(lambda ab: fn(*ab), pieces))
    return {k: np.concatenate([r[k] for r in results]) for k in results[0]}
