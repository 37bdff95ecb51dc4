"""Order-preserving process pool map.

Shared, possibly unpicklable resources (atlas, vocab) are handed to workers
through ``fork`` and a pool initializer; only the per-item arguments and the
results cross process boundaries.  Results always come back in input order,
so output never depends on the worker count.
"""

from __future__ import annotations

import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

_STATE: tuple = ()


def _init(fn, shared) -> None:
    global _STATE
    _STATE = (fn, shared)


def _call(item):
    fn, shared = _STATE
    return fn(item, *shared)


def ordered_map(fn: Callable, items: Sequence, jobs: int = 1, shared: tuple = ()) -> list:
    """``[fn(item, *shared) for item in items]``, optionally across ``jobs`` processes."""
    items = list(items)
    if jobs <= 1 or len(items) < 2 or "fork" not in multiprocessing.get_all_start_methods():
        return [fn(item, *shared) for item in items]
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(min(jobs, len(items)), mp_context=ctx,
                             initializer=_init, initargs=(fn, shared)) as pool:
        return list(pool.map(_call, items, chunksize=max(1, len(items) // (4 * jobs))))
