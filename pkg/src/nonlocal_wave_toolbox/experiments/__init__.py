"""
Config-driven experiments: YAML configs, built-in presets, the scenario runner and the CLI.
"""

from .config import ExperimentConfig, echo, load_config, parse_config
from .presets import PRESETS, Preset, get_preset, list_presets
from .runner import RunReport, resolve_source, run_scenario

__all__ = [
    "ExperimentConfig",
    "echo",
    "load_config",
    "parse_config",
    "PRESETS",
    "Preset",
    "get_preset",
    "list_presets",
    "RunReport",
    "resolve_source",
    "run_scenario",
]
