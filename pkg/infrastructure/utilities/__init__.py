"""
Infrastructure Utilities Module
Provides logging, structured logging and error handling.
"""

from .logger import get_logger, ApplicationLogger, app_logger, log_function_call
from .structured_logger import get_structured_logger, CorrelationContext, with_structured_logging
from .error_handling import (
    SimulationError,
    ErrorSeverity,
    ErrorContext,
    StructuredError,
    ErrorHandler,
)

__all__ = [
    'get_logger',
    'ApplicationLogger',
    'app_logger',
    'log_function_call',
    'get_structured_logger',
    'CorrelationContext',
    'with_structured_logging',
    'SimulationError',
    'ErrorSeverity',
    'ErrorContext',
    'StructuredError',
    'ErrorHandler',
]
