"""
Configuration module for the quasistatic fracture simulator.
Contains application-wide defaults and the validation result types shared by
the run-config loader. Only the output directory may be overridden from the
environment (FRACTURE_OUTPUT_DIR, optionally through a .env file).
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from infrastructure.utilities.logger import get_logger

logger = get_logger(__name__)

OUTPUT_DIR_ENV = "FRACTURE_OUTPUT_DIR"


@dataclass
class ConfigValidationResult:
    """Result of configuration validation."""
    valid: bool = True
    issues: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def add_issue(self, issue: str) -> None:
        """Add a validation issue."""
        self.issues.append(issue)
        self.valid = False

    def add_warning(self, warning: str) -> None:
        """Add a validation warning."""
        self.warnings.append(warning)

    def merge(self, other: "ConfigValidationResult") -> None:
        for issue in other.issues:
            self.add_issue(issue)
        self.warnings.extend(other.warnings)


class EnvironmentConfig:
    """Environment variable configuration manager."""

    @staticmethod
    def load_env_file(env_path: str = ".env") -> bool:
        """Load environment variables from .env file if available."""
        env_file = Path(env_path)
        if env_file.exists():
            load_dotenv(env_file)
            logger.debug(f"Loaded environment variables from {env_path}")
            return True
        return False

    @staticmethod
    def get_output_dir_override() -> Optional[Path]:
        value = os.getenv(OUTPUT_DIR_ENV)
        return Path(value) if value else None


class ConfigValidator:
    """Configuration validation utility class."""

    @staticmethod
    def validate_numeric_range(value: Any, min_val: float, max_val: float, name: str,
                               open_low: bool = False, open_high: bool = False) -> Optional[str]:
        """Validate that a numeric value is within a specified range."""
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return f"{name} must be a number, got {type(value).__name__}"
        low_bad = value <= min_val if open_low else value < min_val
        high_bad = value >= max_val if open_high else value > max_val
        if low_bad or high_bad:
            left = "(" if open_low else "["
            right = ")" if open_high else "]"
            return f"{name} must be in {left}{min_val}, {max_val}{right}, got {value}"
        return None

    @staticmethod
    def validate_choice(value: Any, choices: List[str], name: str) -> Optional[str]:
        if value not in choices:
            return f"{name} must be one of {', '.join(choices)}, got {value!r}"
        return None

    @staticmethod
    def validate_string_not_empty(value: Any, name: str) -> Optional[str]:
        """Validate that a string value is not empty."""
        if not isinstance(value, str) or not value.strip():
            return f"{name} must be a non-empty string"
        return None


env_config = EnvironmentConfig()
env_config.load_env_file()


def _get_solver_config() -> Dict[str, Any]:
    """Defaults of the [solver] block."""
    return {
        "mode": "oracle",
        "enumeration_cap": 20,
        "max_candidates": 64,
        "adaptive_band": "brittle",
        "adaptive_mode": "uniform",
        "newton_tolerance": 1e-10,
        "newton_max_iterations": 200,
        "dense_threshold": 400,
        "heuristic_rank": "full",
        "threads": 1,
        "audit_competitors": 200,
    }


def _get_quadrature_config() -> Dict[str, Any]:
    return {
        "triangle_points": 3,
        "edge_points": 2,
        "time_points": 3,
        "sup_sampling": 64,
        "jump_tolerance": 1e-10,
        "theta_samples": [0.0, 0.25, 0.5, 0.75, 1.0],
    }


def _get_output_config() -> Dict[str, Any]:
    override = env_config.get_output_dir_override()
    return {
        "directory": str(override) if override else "runs/latest",
        "directory_overridden": override is not None,
        "write_vtk": True,
        "write_json": True,
        "float_format": "%.17g",
    }


def _get_study_config() -> Dict[str, Any]:
    return {
        "sample_times": 5,
        "cross_mesh_points": 7,
        "max_workers": 2,
    }


SOLVER_CONFIG = _get_solver_config()
QUADRATURE_CONFIG = _get_quadrature_config()
OUTPUT_CONFIG = _get_output_config()
STUDY_CONFIG = _get_study_config()


def get_solver_config() -> Dict[str, Any]:
    return SOLVER_CONFIG.copy()


def get_quadrature_config() -> Dict[str, Any]:
    return QUADRATURE_CONFIG.copy()


def get_output_config() -> Dict[str, Any]:
    return OUTPUT_CONFIG.copy()


def get_study_config() -> Dict[str, Any]:
    return STUDY_CONFIG.copy()


def validate_config() -> ConfigValidationResult:
    """Sanity check of the application defaults."""
    result = ConfigValidationResult()
    validator = ConfigValidator()

    error = validator.validate_choice(SOLVER_CONFIG["mode"], ["oracle", "heuristic", "both"], "solver.mode")
    if error:
        result.add_issue(error)
    error = validator.validate_numeric_range(SOLVER_CONFIG["enumeration_cap"], 0, 30, "solver.enumeration_cap")
    if error:
        result.add_issue(error)
    error = validator.validate_numeric_range(QUADRATURE_CONFIG["triangle_points"], 1, 7, "quadrature.triangle_points")
    if error:
        result.add_issue(error)
    if QUADRATURE_CONFIG["triangle_points"] not in (1, 3, 7):
        result.add_issue("quadrature.triangle_points must be 1, 3 or 7")
    if OUTPUT_CONFIG["directory_overridden"]:
        result.add_warning(f"Output directory overridden by {OUTPUT_DIR_ENV}")
    return result


def reload_config() -> None:
    """Reload configuration from environment variables."""
    global SOLVER_CONFIG, QUADRATURE_CONFIG, OUTPUT_CONFIG, STUDY_CONFIG

    env_config.load_env_file()
    SOLVER_CONFIG = _get_solver_config()
    QUADRATURE_CONFIG = _get_quadrature_config()
    OUTPUT_CONFIG = _get_output_config()
    STUDY_CONFIG = _get_study_config()
    logger.debug("Configuration reloaded from environment variables")
