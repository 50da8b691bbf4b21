from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Optional

_pools: dict = {}


def _pool(threads: int) -> ThreadPoolExecutor:
    pool = _pools.get(threads)
    if pool is None:
        pool = _pools[threads] = ThreadPoolExecutor(max_workers=threads)
    return pool


def for_row_bands(kernel, args: tuple, height: int, threads: Optional[int] = 1) -> None:
    """Run kernel(*args, y0, y1) over horizontal bands covering [0, height)."""
    threads = max(1, int(threads or 1))
    if threads == 1 or height < 2 * threads:
        kernel(*args, 0, height)
        return
    edges = [round(i * height / threads) for i in range(threads + 1)]
    futures = [
        _pool(threads).submit(kernel, *args, edges[i], edges[i + 1])
        for i in range(threads)
        if edges[i + 1] > edges[i]
    ]
    for f in futures:
        f.result()
