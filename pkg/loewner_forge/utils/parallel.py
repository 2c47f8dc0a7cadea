"""
Parallel
--------
Ensemble execution over a process pool.

Every ensemble member draws from its own RNG stream, so results do not depend on the worker count;
they are collected in submission order.
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from tqdm import tqdm

from loewner_forge.core.errors import ParameterError

logger = logging.getLogger(__name__)

WORKERS_ENV = "LOEWNER_FORGE_WORKERS"

T = TypeVar("T")
R = TypeVar("R")


def worker_count(workers: Optional[int] = None) -> int:
    """
    Resolve the number of worker processes.

    :param workers: Explicit count; ``None`` falls back to ``LOEWNER_FORGE_WORKERS`` and then to 1.
    :raises ParameterError: If the resolved count is not a positive integer.
    """
    if workers is None:
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            workers = int(raw)
        except ValueError:
            raise ParameterError(f"{WORKERS_ENV} must be an integer, got {raw!r}.")
    if workers < 1:
        raise ParameterError(f"Worker count must be positive, got {workers}.")
    return workers


def run_ensemble(
    function: Callable[[T], R],
    items: Iterable[T],
    workers: Optional[int] = None,
    *,
    desc: Optional[str] = None,
    progress: bool = False,
) -> List[R]:
    """
    Apply ``function`` to every item, in a process pool when more than one worker is requested.

    :param function: A picklable callable (module-level function or :py:func:`functools.partial`).
    :param desc: Progress bar label.
    :return: Results in the order of ``items``.
    """
    items = list(items)
    workers = worker_count(workers)
    bar = tqdm(total=len(items), desc=desc, disable=not progress)
    try:
        if workers == 1 or len(items) < 2:
            results = []
            for item in items:
                results.append(function(item))
                bar.update()
            return results
        logger.debug(f"Running {len(items)} ensemble members on {workers} workers")
        chunksize = max(1, len(items) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = []
            for result in executor.map(function, items, chunksize=chunksize):
                results.append(result)
                bar.update()
            return results
    finally:
        bar.close()
