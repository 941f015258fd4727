from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Callable, Dict, Generic, List, Optional, Sequence, Tuple, TypeVar
import logging
import time

T = TypeVar('T')
R = TypeVar('R')


@dataclass
class SweepOutcome(Generic[R]):
    """Results of a grid evaluation, ordered by grid index"""
    results: List[R]
    duration_s: float
    workers: int
    failures: Dict[int, Exception] = field(default_factory=dict)

    def completed(self, grid: Sequence[T]) -> List[Tuple[T, R]]:
        """(point, result) pairs for the grid points that did not fail"""
        return [
            (point, result)
            for idx, (point, result) in enumerate(zip(grid, self.results))
            if idx not in self.failures
        ]


class GridRunner:
    """
    Evaluates independent grid points, optionally on a thread pool.
    Results always come back in grid order, whatever order the points finish in.
    With fail_fast off, a failing point leaves None in its slot and its
    exception in SweepOutcome.failures.
    """

    def __init__(self, config: Optional[Dict] = None):
        self.config = config or self.default_config()
        self.logger = logging.getLogger(__name__)

    def default_config(self) -> Dict:
        return {
            'workers': 1,
            'fail_fast': True
        }

    def run(self, func: Callable[[T], R], grid: Sequence[T]) -> SweepOutcome[R]:
        """Evaluate func at every grid point"""
        workers = max(1, int(self.config['workers']))
        start = time.perf_counter()
        results: List[Optional[R]] = [None] * len(grid)
        failures: Dict[int, Exception] = {}

        if workers == 1 or len(grid) < 2:
            for idx, point in enumerate(grid):
                try:
                    results[idx] = func(point)
                except Exception as exc:
                    if self.config['fail_fast']:
                        raise
                    self._record_failure(failures, idx, exc)
            return SweepOutcome(results, time.perf_counter() - start, 1, failures)

        with ThreadPoolExecutor(max_workers=workers) as executor:
            future_to_idx = {executor.submit(func, point): idx for idx, point in enumerate(grid)}
            for future in as_completed(future_to_idx):
                idx = future_to_idx[future]
                try:
                    results[idx] = future.result()
                except Exception as exc:
                    if self.config['fail_fast']:
                        for pending in future_to_idx:
                            pending.cancel()
                        raise
                    self._record_failure(failures, idx, exc)

        duration = time.perf_counter() - start
        self.logger.debug(f"Evaluated {len(grid)} points on {workers} workers in {duration:.3f}s")
        return SweepOutcome(results, duration, workers, failures)

    def _record_failure(self, failures: Dict[int, Exception], idx: int, exc: Exception):
        self.logger.warning(f"Grid point {idx} failed: {exc}")
        failures[idx] = exc

    def map(self, func: Callable[[T], R], grid: Sequence[T]) -> List[R]:
        """Results only, None where a point failed"""
        return self.run(func, grid).results
