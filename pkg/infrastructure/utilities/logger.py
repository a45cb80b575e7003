"""
Logging module for the quasistatic fracture simulator.
Provides console logging with level colours and an optional rotating run log.
"""

import logging
import logging.handlers
import sys
from datetime import datetime
from functools import wraps
from pathlib import Path
from typing import Optional

from colorama import Fore, Style, init as colorama_init

colorama_init(autoreset=False)

ROOT_LOGGER_NAME = "quasistatic_fracture"


class CustomFormatter(logging.Formatter):
    """Custom formatter with colors for different log levels."""

    COLORS = {
        'DEBUG': Fore.CYAN,
        'INFO': Fore.GREEN,
        'WARNING': Fore.YELLOW,
        'ERROR': Fore.RED,
        'CRITICAL': Fore.MAGENTA,
    }

    def format(self, record):
        # Work on a copy so the file handler keeps the plain level name
        record = logging.makeLogRecord(record.__dict__)
        color = self.COLORS.get(record.levelname, '')
        record.levelname = f"{color}{record.levelname}{Style.RESET_ALL}"
        return super().format(record)


class ApplicationLogger:
    """Owns the handlers of the package root logger."""

    def __init__(self, name: str = ROOT_LOGGER_NAME, level: int = logging.INFO):
        self.name = name
        self.logger = logging.getLogger(name)
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False
        self.file_handler: Optional[logging.Handler] = None

        if not self.logger.handlers:
            self._setup_console_handler(level)

    def _setup_console_handler(self, level: int) -> None:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(level)
        console_handler.setFormatter(CustomFormatter(
            '%(asctime)s - %(levelname)s - %(message)s',
            datefmt='%H:%M:%S'
        ))
        self.logger.addHandler(console_handler)

    def set_console_level(self, level: int) -> None:
        for handler in self.logger.handlers:
            if handler is not self.file_handler:
                handler.setLevel(level)

    def attach_run_log(self, log_dir: Path) -> Path:
        """Write DEBUG and above to ``<log_dir>/run.log`` with rotation."""
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        log_path = log_dir / "run.log"

        self.detach_run_log()
        file_handler = logging.handlers.RotatingFileHandler(
            log_path,
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(module)s:%(lineno)d - %(message)s'
        ))
        self.logger.addHandler(file_handler)
        self.file_handler = file_handler
        return log_path

    def detach_run_log(self) -> None:
        if self.file_handler is not None:
            self.logger.removeHandler(self.file_handler)
            self.file_handler.close()
            self.file_handler = None


# Global logger instance
app_logger = ApplicationLogger()


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    Get a logger below the package root logger.

    Args:
        name: Module name (``__name__``); defaults to the root logger

    Returns:
        Configured logger instance
    """
    if not name or name == ROOT_LOGGER_NAME:
        return app_logger.logger
    if name.startswith(ROOT_LOGGER_NAME + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


def log_function_call(func_name: Optional[str] = None):
    """Decorator logging start, completion time and failure of a call at DEBUG level."""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            name = func_name or func.__name__
            logger = get_logger(func.__module__)
            start_time = datetime.now()
            logger.debug(f"Starting {name}")
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                duration = (datetime.now() - start_time).total_seconds()
                logger.error(f"Failed {name} after {duration:.2f}s: {type(e).__name__}: {e}")
                raise
            duration = (datetime.now() - start_time).total_seconds()
            logger.debug(f"Completed {name} in {duration:.2f}s")
            return result
        return wrapper
    return decorator


__all__ = ['get_logger', 'ApplicationLogger', 'app_logger', 'log_function_call', 'CustomFormatter']
