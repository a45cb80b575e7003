"""
Structured logging for the quasistatic fracture simulator.
Provides run correlation ids, JSON log events and operation timing.
"""

import time
import traceback
import uuid
from contextlib import contextmanager
from functools import wraps
from typing import Any, Dict, Optional

import structlog

from .logger import ROOT_LOGGER_NAME, get_logger

structlog.configure(
    processors=[
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
        structlog.processors.JSONRenderer(sort_keys=True)
    ],
    context_class=dict,
    logger_factory=structlog.stdlib.LoggerFactory(),
    wrapper_class=structlog.stdlib.BoundLogger,
    cache_logger_on_first_use=True,
)


class CorrelationContext:
    """Holds the id shared by every log event of one run."""

    _run_id: Optional[str] = None

    @classmethod
    def get_run_id(cls) -> str:
        if cls._run_id is None:
            cls._run_id = str(uuid.uuid4())[:8]
        return cls._run_id

    @classmethod
    def new_run(cls, run_id: Optional[str] = None) -> str:
        cls._run_id = run_id or str(uuid.uuid4())[:8]
        return cls._run_id


class StructuredLogger:
    """Component logger emitting JSON events through structlog."""

    def __init__(self, component_name: str):
        self.component_name = component_name
        # Route through the package logger tree so console/file handlers apply
        get_logger(f"{ROOT_LOGGER_NAME}.events.{component_name}")
        self._logger = structlog.get_logger(f"{ROOT_LOGGER_NAME}.events.{component_name}")

    def _bound(self, operation: Optional[str], duration: Optional[float], fields: Dict[str, Any]):
        context = {'component': self.component_name, 'run_id': CorrelationContext.get_run_id()}
        if operation:
            context['operation'] = operation
        if duration is not None:
            context['duration_ms'] = round(duration * 1000, 2)
        context.update(fields)
        return self._logger.bind(**context)

    def debug(self, message: str, operation: Optional[str] = None, **kwargs):
        self._bound(operation, None, kwargs).debug(message)

    def info(self, message: str, operation: Optional[str] = None, **kwargs):
        self._bound(operation, None, kwargs).info(message)

    def warning(self, message: str, operation: Optional[str] = None, **kwargs):
        self._bound(operation, None, kwargs).warning(message)

    def error(
        self,
        message: str,
        operation: Optional[str] = None,
        exception: Optional[BaseException] = None,
        **kwargs
    ):
        """Log error message with structured data and exception details."""
        if exception is not None:
            kwargs['exception'] = {
                'type': type(exception).__name__,
                'message': str(exception),
                'traceback': ''.join(traceback.format_exception(
                    type(exception), exception, exception.__traceback__
                )),
            }
        self._bound(operation, None, kwargs).error(message)

    def performance(self, operation: str, duration: float, success: bool = True, **metrics):
        self._bound(operation, duration, dict(success=success, **metrics)).info(
            f"Performance: {operation}"
        )

    @contextmanager
    def operation_context(self, operation: str, **context_data):
        """Log start, completion time and failure of a block."""
        start_time = time.perf_counter()
        operation_id = str(uuid.uuid4())[:8]
        self.debug(f"Starting operation: {operation}", operation=operation,
                   operation_id=operation_id, **context_data)
        try:
            yield operation_id
        except Exception as e:
            self.error(
                f"Operation failed: {operation}",
                operation=operation,
                exception=e,
                operation_id=operation_id,
                duration_ms=round((time.perf_counter() - start_time) * 1000, 2),
                **context_data
            )
            raise
        self.performance(operation, time.perf_counter() - start_time, success=True,
                         operation_id=operation_id, **context_data)


class LoggingManager:
    """Caches one structured logger per component."""

    _loggers: Dict[str, StructuredLogger] = {}

    @classmethod
    def get_logger(cls, component_name: str) -> StructuredLogger:
        if component_name not in cls._loggers:
            cls._loggers[component_name] = StructuredLogger(component_name)
        return cls._loggers[component_name]


def with_structured_logging(component_name: str, operation: Optional[str] = None):
    """Decorator wrapping a function in ``operation_context``."""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            logger = LoggingManager.get_logger(component_name)
            with logger.operation_context(operation or func.__name__):
                return func(*args, **kwargs)
        return wrapper
    return decorator


def get_structured_logger(component_name: str) -> StructuredLogger:
    """Get structured logger for component."""
    return LoggingManager.get_logger(component_name)


__all__ = [
    'StructuredLogger',
    'CorrelationContext',
    'get_structured_logger',
    'with_structured_logging',
]
