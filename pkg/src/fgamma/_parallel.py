"""Ordered task pool with counter-based seeding.

Results never depend on the thread count: every task derives its own RNG
from ``(seed, *counters)`` and results are reduced in submission order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

_threads: Optional[int] = None


def set_threads(n: Optional[int]) -> None:
    global _threads
    _threads = None if n is None else max(1, int(n))


def get_threads() -> int:
    if _threads is not None:
        return _threads
    env = os.environ.get("FGAMMA_THREADS")
    if env:
        return max(1, int(env))
    return 1


def task_rng(seed: int, *counters: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), *[int(c) for c in counters]])


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> list[R]:
    items = list(items)
    k = threads or get_threads()
    if k <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))
