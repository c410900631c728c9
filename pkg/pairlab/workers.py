"""Ordered fan-out of independent scan points over a process pool."""

import logging
from multiprocessing import Pool
from typing import Any, Callable, List, Sequence, Tuple

logger = logging.getLogger(__name__)


class _Guarded:
    """Picklable wrapper that turns exceptions into (False, message) results."""

    def __init__(self, func: Callable[[Any], Any]):
        self.func = func

    def __call__(self, item: Any) -> Tuple[bool, Any]:
        try:
            return True, self.func(item)
        except Exception as e:  # per-point isolation
            return False, f"{type(e).__name__}: {e}"


def parallel_map(func: Callable[[Any], Any], items: Sequence[Any], workers: int = 1) -> List[Tuple[bool, Any]]:
    """
    Apply func to every item, preserving input order.

    Args:
        func: Module-level callable (must be picklable when workers > 1).
        items: Inputs.
        workers: Process count; 1 runs in the calling process.

    Returns:
        One (ok, value-or-error-message) tuple per item, in input order.
    """
    guarded = _Guarded(func)
    if workers <= 1 or len(items) <= 1:
        results = [guarded(item) for item in items]
    else:
        processes = min(workers, len(items))
        logger.info(f"Fanning out {len(items)} points over {processes} processes")
        with Pool(processes=processes) as pool:
            results = pool.map(guarded, items)
    for index, (ok, value) in enumerate(results):
        if not ok:
            logger.warning(f"Point {index} failed: {value}")
    return results
