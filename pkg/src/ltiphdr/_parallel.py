from __future__ import annotations

import concurrent.futures
import logging
import sys
import types
import typing

from ltiphdr._protocols import PoolProtocol

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

__all__ = ["TilePool", "map_units"]

logger = logging.getLogger(__name__)

T = typing.TypeVar("T")
R = typing.TypeVar("R")


class TilePool:
    """A thread pool mapping pure functions over independent work units.

    Results are always returned in input order. Work units are whole arrays (a
    frame, a channel, a curve); since each unit runs the same operations whatever
    the number of workers, results do not depend on the worker count.
    """

    _workers: int
    _executor: concurrent.futures.ThreadPoolExecutor | None

    def __init__(self, workers: int = 1) -> None:
        """Initialize a pool for the given number of workers.

        Parameters
        ----------
        workers : int, optional
            The number of worker threads, by default 1. With one worker all work
            runs inline on the calling thread.
        """
        if workers < 1:
            raise ValueError(f"Invalid value for `workers`: {workers}. Must be >= 1")
        self._workers = workers
        self._executor = None

    @property
    def workers(self) -> int:
        """The number of worker threads."""
        return self._workers

    @property
    def running(self) -> bool:
        """Whether worker threads are currently started."""
        return self._executor is not None

    def start(self) -> Self:
        """Start the worker threads. A no-op with one worker or when running."""
        if self._executor is not None or self._workers == 1:
            return self
        self._executor = concurrent.futures.ThreadPoolExecutor(
            max_workers=self._workers, thread_name_prefix="ltiphdr"
        )
        logger.debug("started pool with %d workers", self._workers)
        return self

    def stop(self) -> Self:
        """Stop the worker threads, waiting for pending work."""
        if self._executor is None:
            return self
        try:
            self._executor.shutdown(wait=True)
        finally:
            self._executor = None
        return self

    def map(self, func: typing.Callable[[T], R], items: typing.Iterable[T]) -> list[R]:
        """Apply ``func`` to every item and collect the results in order."""
        if self._executor is None:
            return [func(item) for item in items]
        return list(self._executor.map(func, items))

    def __enter__(self) -> Self:
        return self.start()

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: types.TracebackType | None,
    ) -> None:
        self.stop()


def map_units(
    pool: PoolProtocol | None, func: typing.Callable[[T], R], items: typing.Iterable[T]
) -> list[R]:
    """Map ``func`` over ``items`` on ``pool``, or inline when there is none."""
    if pool is None:
        return [func(item) for item in items]
    return pool.map(func, items)
