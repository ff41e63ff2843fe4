"""Optional thread parallelism, capped by the LEMNISCATE_THREADS env var."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("LEMNISCATE_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """Order-preserving map; runs on a thread pool when the cap allows."""
    items = list(items)
    n = thread_cap()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
