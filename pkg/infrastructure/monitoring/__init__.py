"""
Monitoring Module
Run metrics and memory snapshots.
"""

from .performance_monitor import MetricsCollector, PerformanceTimer

__all__ = ['MetricsCollector', 'PerformanceTimer']
