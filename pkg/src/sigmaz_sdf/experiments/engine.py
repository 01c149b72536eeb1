"""Concurrent sweep engine."""

import asyncio
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, Generic, List, Optional, Sequence, TypeVar

from ..base import BaseProcessor
from ..config.performance import get_performance_settings
from ..exceptions import FitError, NumericalError, SweepPointError

T = TypeVar("T")


@dataclass(frozen=True)
class PointOutcome(Generic[T]):
    """Result or recorded failure of one sweep point."""

    index: int
    value: Any
    result: Optional[T] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


class SweepEngine(BaseProcessor):
    """Run independent sweep points on a thread pool.

    A semaphore bounds the number of points in flight; numerical failures
    are recorded on the point unless `fail_fast` is set, in which case the
    first one aborts the sweep with a SweepPointError naming the point.
    Results always come back in input order.
    """

    def __init__(
        self,
        max_workers: Optional[int] = None,
        max_concurrent: Optional[int] = None,
        fail_fast: bool = False,
        performance_mode: str = "balanced",
    ) -> None:
        """Initialize sweep engine."""
        super().__init__("sweep_engine")
        worker_settings = get_performance_settings(performance_mode, max_workers)
        self.max_workers = worker_settings["max_workers"]
        self.max_concurrent = max_concurrent or worker_settings["max_concurrent_points"]
        self.fail_fast = fail_fast
        self._point_times: List[float] = []

    async def run_points(
        self,
        kind: str,
        values: Sequence[Any],
        func: Callable[[Any], T],
    ) -> List[PointOutcome[T]]:
        """Evaluate `func` at every value concurrently."""
        semaphore = asyncio.Semaphore(self.max_concurrent)
        loop = asyncio.get_running_loop()
        self.log_operation("Sweep", kind=kind, points=len(values), workers=self.max_workers)
        self.start_clock()

        executor = ThreadPoolExecutor(max_workers=self.max_workers)

        async def _run_one(index: int, value: Any) -> PointOutcome[T]:
            async with semaphore:
                self.logger.debug("Sweep point started", kind=kind, value=value)
                started = time.perf_counter()
                try:
                    result = await loop.run_in_executor(executor, func, value)
                except (NumericalError, FitError) as exc:
                    self.processed_count += 1
                    self.error_count += 1
                    self.logger.warning(
                        "Sweep point failed",
                        kind=kind,
                        value=value,
                        error=str(exc),
                        error_type=type(exc).__name__,
                    )
                    if self.fail_fast:
                        raise SweepPointError(kind, _as_float(value), exc) from exc
                    return PointOutcome(index=index, value=value, error=str(exc))
                self.processed_count += 1
                self._point_times.append(time.perf_counter() - started)
                self.logger.debug("Sweep point finished", kind=kind, value=value)
                return PointOutcome(index=index, value=value, result=result)

        tasks = [asyncio.ensure_future(_run_one(i, v)) for i, v in enumerate(values)]
        try:
            outcomes = await asyncio.gather(*tasks)
        except BaseException:
            # queued points never start once one has failed
            for task in tasks:
                task.cancel()
            executor.shutdown(wait=False, cancel_futures=True)
            await asyncio.gather(*tasks, return_exceptions=True)
            self.logger.warning("Sweep aborted", kind=kind, processed=self.processed_count)
            raise
        finally:
            executor.shutdown(wait=True)
            self.stop_clock()

        outcomes = sorted(outcomes, key=lambda o: o.index)
        self.log_success("Sweep", kind=kind, **self.get_final_stats())
        return outcomes

    def map(
        self, kind: str, values: Sequence[Any], func: Callable[[Any], T]
    ) -> List[PointOutcome[T]]:
        """Synchronous wrapper around `run_points`.

        Inside a running event loop the sweep gets its own loop on a helper
        thread; coroutines should await `run_points` directly instead.
        """
        try:
            asyncio.get_running_loop()
        except RuntimeError:
            return asyncio.run(self.run_points(kind, values, func))
        with ThreadPoolExecutor(max_workers=1) as runner:
            return runner.submit(
                lambda: asyncio.run(self.run_points(kind, values, func))
            ).result()

    def get_final_stats(self) -> Dict[str, Any]:
        """Engine statistics for the last sweep."""
        stats = self.get_stats()
        stats["avg_point_time"] = (
            sum(self._point_times) / len(self._point_times) if self._point_times else 0.0
        )
        return stats

    def reset_stats(self) -> None:
        super().reset_stats()
        self._point_times = []


def _as_float(value: Any) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        return float("nan")
