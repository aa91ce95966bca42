"""Chunked evaluation over point sets.

Points are cut into chunks of a fixed size that does not depend on the
number of workers, and every output element is computed from its own chunk
only, so results are bitwise identical for any degree of parallelism.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 4096

_workers = 1


def set_workers(n: int) -> None:
    global _workers
    if n < 1:
        raise ValueError("worker count must be >= 1")
    _workers = int(n)


def get_workers() -> int:
    return _workers


def map_points(func, points: np.ndarray, workers: int | None = None, chunk: int = CHUNK):
    """Apply ``func`` to row chunks of ``points`` and concatenate the results.

    ``func`` returns an array or a tuple of arrays whose first axis indexes
    points.
    """
    points = np.asarray(points)
    workers = _workers if workers is None else workers
    bounds = [(s, min(s + chunk, len(points))) for s in range(0, len(points), chunk)]
    if not bounds:
        return func(points)
    if workers == 1 or len(bounds) == 1:
        parts = [func(points[a:b]) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: func(points[ab[0]:ab[1]]), bounds))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate([p[i] for p in parts]) for i in range(len(parts[0])))
    return np.concatenate(parts)
