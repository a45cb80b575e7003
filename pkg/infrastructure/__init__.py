"""
Infrastructure Module

Logging, error handling and run monitoring shared by the simulator packages.
"""

from .utilities.logger import get_logger
from .utilities.structured_logger import get_structured_logger
from .utilities.error_handling import SimulationError, ErrorHandler
from .monitoring.performance_monitor import MetricsCollector

__all__ = [
    'get_logger',
    'get_structured_logger',
    'SimulationError',
    'ErrorHandler',
    'MetricsCollector',
]
