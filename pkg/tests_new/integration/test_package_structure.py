"""
Import smoke test: every subpackage loads and exports what it declares.
"""

import importlib

import pytest

import app

PACKAGES = [
    "quasistatic_fracture.mesh",
    "quasistatic_fracture.model",
    "quasistatic_fracture.fespace",
    "quasistatic_fracture.crack",
    "quasistatic_fracture.solver",
    "quasistatic_fracture.evolution",
    "quasistatic_fracture.exporters",
    "quasistatic_fracture.cli",
    "infrastructure.utilities",
    "infrastructure.monitoring",
]


@pytest.mark.parametrize("name", PACKAGES)
def test_exports_resolve(name):
    module = importlib.import_module(name)
    missing = [attr for attr in getattr(module, "__all__", []) if not hasattr(module, attr)]
    assert missing == []


def test_infrastructure_helpers():
    from infrastructure.utilities.error_handling import ErrorContext, SimulationError
    from infrastructure.utilities.logger import get_logger
    from infrastructure.utilities.structured_logger import get_structured_logger

    assert get_logger("quasistatic_fracture.test").name.endswith("test")
    assert get_structured_logger("test") is get_structured_logger("test")
    assert issubclass(SimulationError, Exception)
    assert ErrorContext(operation="sample").operation == "sample"


def test_subcommands():
    parser = app.build_parser()
    for command in ("validate", "run", "study", "oracle-check", "interpolation-error"):
        args = parser.parse_args([command] if command == "interpolation-error"
                                 else [command, "--config", "run.toml"])
        assert args.command == command
