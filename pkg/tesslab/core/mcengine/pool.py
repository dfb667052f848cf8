import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor

from tesslab.core.errors import InvalidParameterError


class ReplicationPool:
    """
    Runs independent replications, in worker processes when threads > 1.
    Results come back in submission order, so aggregation never depends on
    the worker count.
    """

    def __init__(self, threads: int = 1) -> None:
        if threads < 1:
            raise InvalidParameterError(f"threads must be >= 1, got {threads}")
        self._threads = threads
        self._executor: ProcessPoolExecutor | None = None
        self._logger = logging.getLogger("core.mcengine.pool")

    @property
    def threads(self) -> int:
        return self._threads

    def map[T, R](self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        items = list(items)
        if self._threads == 1 or len(items) < 2:
            return [fn(item) for item in items]
        if self._executor is None:
            self._logger.debug(f"Starting {self._threads} worker processes")
            self._executor = ProcessPoolExecutor(max_workers=self._threads)
        chunk = max(1, len(items) // (4 * self._threads))
        return list(self._executor.map(fn, items, chunksize=chunk))

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None

    def __enter__(self) -> "ReplicationPool":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
