# File: sweep.py
"""
Deterministic parallel evaluation over parameter grids.

Grid points are independent steady-state or correlation solves. They are
farmed out to a thread pool (the dense LAPACK calls release the GIL) and the
results are returned in input order, so output never depends on scheduling.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int]) -> int:
    """Worker count: the explicit value, else config.DEFAULT_THREADS."""
    count = config.DEFAULT_THREADS if threads is None else int(threads)
    if count < 1:
        raise ValueError(f"Thread count must be a positive integer, got {threads}")
    return count


def map_points(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None,
               label: str = "grid") -> List[R]:
    """
    Applies func to every item and returns the results in item order.

    The first exception raised by any point propagates to the caller.
    """
    points = list(items)
    workers = min(resolve_threads(threads), max(1, len(points)))
    logger.info("Evaluating %s: %d points on %d worker(s)", label, len(points), workers)
    if workers == 1:
        return [func(point) for point in points]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, points))
