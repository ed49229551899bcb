import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar

from .logs import general_logger

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "MULTICOAP_THREADS"


def resolve_threads(threads: Optional[int] = None) -> int:
    """
    Resolve the worker count: explicit value, then `MULTICOAP_THREADS`, then 1.
    """
    if threads is None:
        try:
            threads = int(os.environ.get(THREADS_ENV, "1"))
        except ValueError:
            general_logger.warning(f"Ignoring non-integer {THREADS_ENV}")
            threads = 1
    return max(1, int(threads))


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Map `func` over `items` and return results in input order.

    Every call must write to its own output; the ordering of the returned list
    (and of any later reduction over it) does not depend on `threads`.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))


class Timer:
    """
    Wall-clock stopwatch collecting named laps.

    Usage:
        timer = Timer()
        with timer.lap("fit"):
            ...
        timer.timings  # {"fit": 1.23}
    """

    def __init__(self) -> None:
        self.timings: Dict[str, float] = {}

    def lap(self, name: str) -> "_Lap":
        return _Lap(self, name)


class _Lap:
    def __init__(self, timer: Timer, name: str) -> None:
        self.timer = timer
        self.name = name

    def __enter__(self) -> "_Lap":
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc: Any) -> None:
        self.timer.timings[self.name] = self.timer.timings.get(self.name, 0.0) + (
            time.perf_counter() - self.start
        )

