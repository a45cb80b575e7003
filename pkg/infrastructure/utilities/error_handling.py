"""
Error handling for the quasistatic fracture simulator.
Provides the simulation error base class, structured error records with
user-facing messages and suggested actions, and a central handler used by the CLI.
"""

import sys
import traceback
import uuid
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, TextIO

from .logger import get_logger
from .structured_logger import get_structured_logger

logger = get_logger(__name__)
structured_logger = get_structured_logger("errors")


class SimulationError(Exception):
    """Base class of every error raised by the simulator."""


class ErrorSeverity(Enum):
    """Error severity levels."""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


@dataclass
class ErrorContext:
    """Context information for errors."""
    run_id: Optional[str] = None
    operation: Optional[str] = None
    config_path: Optional[str] = None
    step: Optional[int] = None
    additional_data: Dict[str, Any] = field(default_factory=dict)


@dataclass
class StructuredError:
    """Structured error with comprehensive information."""
    error_id: str
    error_type: str
    message: str
    user_message: str
    severity: ErrorSeverity
    timestamp: datetime
    context: ErrorContext
    traceback_info: Optional[str] = None
    suggested_actions: List[str] = field(default_factory=list)


class ErrorMessageGenerator:
    """Generate user-friendly error messages."""

    ERROR_MESSAGES = {
        "ConfigError": "The run configuration is invalid.",
        "NonConformingDomain": "The domain does not align with the mesh grid.",
        "DomainError": "The domain description is inconsistent.",
        "ParamOutOfRange": "An adaptive knot parameter lies outside [a, 1-a].",
        "FormulaError": "A load or boundary formula could not be evaluated.",
        "DegenerateModel": "The energy model is not coercive as configured.",
        "NonGenericPosition": "A crack segment passes through a mesh vertex or runs along an edge.",
        "CrackOutsideBrittle": "The initial crack leaves the brittle region.",
        "SolveFailure": "The elastic solver did not converge.",
        "EnumerationCapExceeded": "Too many crackable edges for exhaustive enumeration.",
        "EvolutionAborted": "The evolution stopped before the final time.",
        "FileNotFoundError": "A configuration or output file could not be found.",
        "PermissionError": "The output directory is not writable.",
        "MemoryError": "The system ran out of memory.",
        "UnexpectedError": "Something unexpected happened.",
    }

    SUGGESTED_ACTIONS = {
        "ConfigError": [
            "Run the validate subcommand and fix the reported keys",
            "Compare against the schema in templates/README.md",
        ],
        "NonConformingDomain": [
            "Choose an epsilon that divides every polygon and label coordinate",
        ],
        "ParamOutOfRange": [
            "Keep every solver.adaptive_grid value inside [a, 1-a]",
        ],
        "NonGenericPosition": [
            "Shift the crack polyline slightly off mesh vertices and mesh lines",
        ],
        "CrackOutsideBrittle": [
            "Enlarge the brittle region or shorten the initial crack",
        ],
        "EnumerationCapExceeded": [
            "Use --solver heuristic",
            "Raise solver.enumeration_cap or shrink the brittle region",
        ],
        "SolveFailure": [
            "Set model.confinement > 0",
            "Loosen solver.newton_tolerance or raise solver.newton_max_iterations",
        ],
        "DegenerateModel": [
            "Set model.confinement > 0 or model.allow_degenerate = true",
        ],
        "MemoryError": [
            "Use a coarser epsilon",
            "Lower --threads",
        ],
    }

    @classmethod
    def get_user_message(cls, error_type: str, original_message: str = "") -> str:
        """Get user-friendly error message."""
        base_message = cls.ERROR_MESSAGES.get(error_type, cls.ERROR_MESSAGES["UnexpectedError"])
        if original_message:
            base_message += f" Details: {original_message}"
        return base_message

    @classmethod
    def get_suggested_actions(cls, error_type: str) -> List[str]:
        return cls.SUGGESTED_ACTIONS.get(error_type, ["Rerun with --verbose and inspect run.log"])


class ErrorHandler:
    """Central error handler for the command line."""

    def __init__(self, stream: Optional[TextIO] = None):
        self.message_generator = ErrorMessageGenerator()
        self.stream = stream

    def handle_error(
        self,
        exception: BaseException,
        context: ErrorContext,
        show_to_user: bool = True,
        severity: Optional[ErrorSeverity] = None
    ) -> StructuredError:
        """Log an exception and optionally print its user message."""
        error_type = type(exception).__name__
        if severity is None:
            severity = ErrorSeverity.HIGH if isinstance(exception, SimulationError) else ErrorSeverity.CRITICAL

        structured_error = StructuredError(
            error_id=str(uuid.uuid4())[:8],
            error_type=error_type,
            message=str(exception),
            user_message=self.message_generator.get_user_message(error_type, str(exception)),
            severity=severity,
            timestamp=datetime.now(),
            context=context,
            traceback_info=''.join(traceback.format_exception(
                type(exception), exception, exception.__traceback__
            )),
            suggested_actions=self.message_generator.get_suggested_actions(error_type),
        )

        self._log_error(structured_error)
        if show_to_user:
            self._display_error_to_user(structured_error)
        return structured_error

    def _log_error(self, error: StructuredError):
        log_message = (
            f"[{error.error_id}] {error.error_type} in {error.context.operation}: {error.message}"
        )
        if error.severity == ErrorSeverity.LOW:
            logger.info(log_message)
        elif error.severity == ErrorSeverity.MEDIUM:
            logger.warning(log_message)
        elif error.severity == ErrorSeverity.HIGH:
            logger.error(log_message)
        else:
            logger.critical(log_message)
            logger.debug(error.traceback_info)

        structured_logger.error(
            log_message,
            operation=error.context.operation,
            error_id=error.error_id,
            error_type=error.error_type,
            severity=error.severity.value,
            step=error.context.step,
        )

    def _display_error_to_user(self, error: StructuredError):
        stream = self.stream or sys.stderr
        print(f"error: {error.user_message}", file=stream)
        for i, action in enumerate(error.suggested_actions, 1):
            print(f"  {i}. {action}", file=stream)
        if error.severity == ErrorSeverity.CRITICAL:
            print(f"  (error id {error.error_id}, see run.log)", file=stream)


__all__ = [
    'SimulationError',
    'ErrorSeverity',
    'ErrorContext',
    'StructuredError',
    'ErrorMessageGenerator',
    'ErrorHandler',
]
