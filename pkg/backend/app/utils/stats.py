"""
Ensemble statistics
Mergeable counters and moments for Monte Carlo aggregation, plus run timing
"""

import math
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Dict, Iterable, Optional

import numpy as np


def binomial_stderr(p: float, n: int) -> float:
    """Standard error of a frequency estimated from n Bernoulli trials"""
    if n <= 0:
        return float("nan")
    p = min(max(p, 0.0), 1.0)
    return math.sqrt(p * (1.0 - p) / n)


@dataclass
class FrequencyCounter:
    """Hit/trial counter; merging is addition, so chunk order is irrelevant"""
    hits: int = 0
    trials: int = 0

    def merge(self, other: "FrequencyCounter") -> "FrequencyCounter":
        return FrequencyCounter(self.hits + other.hits, self.trials + other.trials)

    @property
    def frequency(self) -> float:
        return self.hits / self.trials if self.trials else float("nan")

    @property
    def stderr(self) -> float:
        return binomial_stderr(self.frequency, self.trials)


@dataclass
class RunningMoments:
    """Count, mean and centered second moment (Chan et al. pairwise merge)"""
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, values: Iterable[float]) -> "RunningMoments":
        arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
        if arr.size == 0:
            return cls()
        mean = float(arr.mean())
        return cls(int(arr.size), mean, float(((arr - mean) ** 2).sum()))

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        if other.count == 0:
            return RunningMoments(self.count, self.mean, self.m2)
        if self.count == 0:
            return RunningMoments(other.count, other.mean, other.m2)
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return RunningMoments(n, mean, m2)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else float("nan")

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count > 1 else float("nan")


def quantile_summary(values: Iterable[Optional[float]]) -> Dict[str, Optional[float]]:
    """Median and quartiles of the defined values; None entries are skipped"""
    arr = np.asarray([v for v in values if v is not None], dtype=float)
    if arr.size == 0:
        return {"count": 0, "median": None, "q1": None, "q3": None, "min": None, "max": None}
    q1, median, q3 = np.quantile(arr, [0.25, 0.5, 0.75])
    return {
        "count": int(arr.size),
        "median": float(median),
        "q1": float(q1),
        "q3": float(q3),
        "min": float(arr.min()),
        "max": float(arr.max()),
    }


class RunStats:
    """Track subcommand runs and their wall time"""

    def __init__(self):
        self.lock = threading.Lock()
        self.reset()

    def reset(self):
        with self.lock:
            self.stats = {
                'total_runs': 0,
                'failed_runs': 0,
                'total_wall_time': 0.0,
                'last_wall_time': 0.0,
            }

    def increment(self, key: str):
        """Increment a counter"""
        with self.lock:
            if key in self.stats:
                self.stats[key] += 1

    def get_stats(self) -> dict:
        with self.lock:
            return self.stats.copy()

    @contextmanager
    def time_run(self):
        """Context manager timing one run; yields a dict that receives `wall_time`"""
        start = time.perf_counter()
        timing = {"wall_time": 0.0}
        try:
            yield timing
        finally:
            duration = time.perf_counter() - start
            timing["wall_time"] = duration
            with self.lock:
                self.stats['total_runs'] += 1
                self.stats['total_wall_time'] += duration
                self.stats['last_wall_time'] = duration


# Global instance
run_stats = RunStats()
