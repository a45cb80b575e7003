"""
Performance monitoring for simulation runs.
Tracks solver counters, operation timings and a process memory snapshot.
"""

import threading
import time
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Any, Dict, List

import psutil

from ..utilities.logger import get_logger

logger = get_logger(__name__)


@dataclass
class PerformanceMetric:
    """Individual performance metric data."""
    name: str
    value: float
    unit: str
    timestamp: datetime
    metadata: Dict[str, Any] = field(default_factory=dict)


@dataclass
class SystemMetrics:
    """Process and host memory at one instant."""
    rss_mb: float
    memory_percent: float
    memory_available_mb: float
    cpu_count: int
    timestamp: str


class MetricsCollector:
    """Collects counters and timings; safe to share between worker threads."""

    def __init__(self):
        self.metrics: Dict[str, List[PerformanceMetric]] = defaultdict(list)
        self.counters: Dict[str, int] = defaultdict(int)
        self._lock = threading.Lock()

    def record_metric(self, name: str, value: float, unit: str = "", **metadata):
        metric = PerformanceMetric(
            name=name, value=float(value), unit=unit,
            timestamp=datetime.now(), metadata=metadata
        )
        with self._lock:
            self.metrics[name].append(metric)
        logger.debug(f"Recorded metric: {name} = {value} {unit}")

    def increment(self, name: str, count: int = 1):
        with self._lock:
            self.counters[name] += count

    def get_metrics(self, name: str) -> List[PerformanceMetric]:
        with self._lock:
            return list(self.metrics[name])

    def get_metric_summary(self, name: str) -> Dict[str, float]:
        """Get statistical summary of a metric."""
        values = [m.value for m in self.get_metrics(name)]
        if not values:
            return {}
        return {
            'count': len(values),
            'min': min(values),
            'max': max(values),
            'avg': sum(values) / len(values),
            'total': sum(values),
            'latest': values[-1],
        }

    def system_snapshot(self) -> SystemMetrics:
        """Memory snapshot of the current process."""
        process = psutil.Process()
        memory = psutil.virtual_memory()
        return SystemMetrics(
            rss_mb=process.memory_info().rss / (1024 * 1024),
            memory_percent=memory.percent,
            memory_available_mb=memory.available / (1024 * 1024),
            cpu_count=psutil.cpu_count() or 1,
            timestamp=datetime.now().isoformat(timespec='seconds'),
        )

    def summary(self) -> Dict[str, Any]:
        """Counters, per-metric summaries and a memory snapshot."""
        with self._lock:
            names = sorted(self.metrics)
            counters = dict(sorted(self.counters.items()))
        return {
            'counters': counters,
            'metrics': {name: self.get_metric_summary(name) for name in names},
            'system': asdict(self.system_snapshot()),
        }


class PerformanceTimer:
    """Context manager for timing operations."""

    def __init__(self, operation_name: str, collector: MetricsCollector, **metadata):
        self.operation_name = operation_name
        self.collector = collector
        self.metadata = metadata
        self.start_time = 0.0
        self.duration = 0.0

    def __enter__(self):
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.duration = time.perf_counter() - self.start_time
        self.collector.record_metric(
            f"{self.operation_name}_duration", self.duration, "seconds", **self.metadata
        )
        if exc_type is not None:
            self.collector.increment(f"{self.operation_name}_failures")
        logger.debug(f"Operation '{self.operation_name}' took {self.duration:.3f}s "
                     f"(Success: {exc_type is None})")


__all__ = ['MetricsCollector', 'PerformanceTimer', 'PerformanceMetric', 'SystemMetrics']
