"""
Worker pool for Monte Carlo ensembles
Work is split into fixed chunks of path indices; results come back in chunk
order, so the merged answer does not depend on the number of workers.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from app.settings import get_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_CHUNK = 256


def chunk_ranges(total: int, chunk: int = DEFAULT_CHUNK) -> List[range]:
    """Split range(total) into consecutive ranges of at most `chunk` items"""
    if total < 0:
        raise ValueError(f"total must be non-negative, got {total}")
    chunk = max(1, int(chunk))
    return [range(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def resolve_workers(workers: Optional[int]) -> int:
    if workers is None or workers <= 0:
        return max(1, get_settings().threads)
    return int(workers)


def map_chunks(
    fn: Callable[[range], T],
    total: int,
    workers: Optional[int] = None,
    chunk: int = DEFAULT_CHUNK,
) -> List[T]:
    """
    Apply fn to every chunk of range(total).

    The chunk boundaries depend only on (total, chunk), never on `workers`.
    """
    ranges = chunk_ranges(total, chunk)
    n_workers = min(resolve_workers(workers), max(1, len(ranges)))
    if n_workers == 1:
        return [fn(r) for r in ranges]

    logger.debug(f"Dispatching {len(ranges)} chunks to {n_workers} workers")
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, ranges))


def map_items(fn: Callable[[T], object], items: Sequence[T], workers: Optional[int] = None) -> list:
    """Ordered parallel map over a short list of independent tasks"""
    n_workers = min(resolve_workers(workers), max(1, len(items)))
    if n_workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, items))
