"""Order-preserving parallel map used by the LOO engine and the benchmark driver."""

from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1,
                 processes: bool = False) -> List[R]:
    """Apply ``fn`` to every item and return results in input order.

    ``workers <= 1`` runs inline. Results never depend on scheduling because
    each job is a pure function of its item.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    executor_cls = ProcessPoolExecutor if processes else ThreadPoolExecutor
    with executor_cls(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
