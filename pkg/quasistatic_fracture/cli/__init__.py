"""
Command-line layer: TOML run configs, scenario presets and the subcommands.
"""

from .presets import PRESETS, deep_merge, get_preset, preset_names
from .run_config import (
    ConfigCheck,
    ConfigError,
    RunConfig,
    check_run_config,
    key_lines,
    load_run_config,
    parse_run_config,
    preset_config,
)
from .commands import cmd_interpolation_error, cmd_oracle_check, cmd_run, cmd_study, cmd_validate, run_checked

__all__ = [
    'PRESETS',
    'deep_merge',
    'get_preset',
    'preset_names',
    'ConfigCheck',
    'ConfigError',
    'RunConfig',
    'check_run_config',
    'key_lines',
    'load_run_config',
    'parse_run_config',
    'preset_config',
    'cmd_interpolation_error',
    'cmd_oracle_check',
    'cmd_run',
    'cmd_study',
    'cmd_validate',
    'run_checked',
]
