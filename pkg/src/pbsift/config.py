"""
Settings file handling

Settings live in a YAML file (~/.pbsift/config.yaml by default):

    detector:
      moduli: [4547]
      max_literals: 500
      oracle_budget: 100000000
    solver:
      mode: gr
      elimination: none
      max_conflicts: null
      time_limit: null
      luby: false
      restart_base: 100
      decay: 0.95
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import AbstractSet, Any, Dict, Optional

import yaml

from .analysis import AnalysisMode, ConflictAnalysisConfig
from .errors import ConfigError
from .relevance import DetectorConfig, EliminationStrategy
from .solver import SolverLimits

CONFIG_ENV_VAR = "PBSIFT_CONFIG"

_DETECTOR_KEYS = {"moduli", "max_literals", "oracle_budget"}
_SOLVER_KEYS = {"mode", "elimination", "max_conflicts", "time_limit", "luby", "restart_base", "decay"}


def default_config_path() -> Path:
    return Path.home() / ".pbsift" / "config.yaml"


@dataclass(frozen=True)
class PbsiftSettings:
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    mode: AnalysisMode = AnalysisMode.GENERALIZED_RESOLUTION
    elimination: EliminationStrategy = EliminationStrategy.OFF
    limits: SolverLimits = field(default_factory=SolverLimits)

    def analysis_config(self) -> ConflictAnalysisConfig:
        return ConflictAnalysisConfig(self.mode, self.elimination, self.detector)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "detector": {
                "moduli": list(self.detector.moduli),
                "max_literals": self.detector.max_literals,
                "oracle_budget": self.detector.oracle_budget,
            },
            "solver": {
                "mode": self.mode.value,
                "elimination": self.elimination.value,
                "max_conflicts": self.limits.max_conflicts,
                "time_limit": self.limits.time_limit,
                "luby": self.limits.luby,
                "restart_base": self.limits.restart_base,
                "decay": self.limits.decay,
            },
        }


def _section(data: Dict[str, Any], name: str, allowed: AbstractSet[str]) -> Dict[str, Any]:
    section = data.get(name) or {}
    if not isinstance(section, dict):
        raise ConfigError(f"'{name}' must be a mapping")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{name}': {', '.join(sorted(unknown))}")
    return dict(section)


def settings_from_dict(data: Optional[Dict[str, Any]]) -> PbsiftSettings:
    """Build settings from a parsed YAML mapping; missing keys take defaults"""
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("settings must be a mapping")
    unknown = set(data) - {"detector", "solver"}
    if unknown:
        raise ConfigError(f"unknown sections: {', '.join(sorted(unknown))}")
    detector = _section(data, "detector", _DETECTOR_KEYS)
    solver = _section(data, "solver", _SOLVER_KEYS)

    try:
        mode = AnalysisMode(solver.pop("mode", AnalysisMode.GENERALIZED_RESOLUTION.value))
        elimination = EliminationStrategy(solver.pop("elimination", EliminationStrategy.OFF.value))
    except ValueError as e:
        raise ConfigError(str(e)) from e
    try:
        limits = SolverLimits(**solver)
    except TypeError as e:
        raise ConfigError(str(e)) from e
    return PbsiftSettings(DetectorConfig(**detector), mode, elimination, limits)


def resolve_config_path(path: Optional[Path] = None) -> Optional[Path]:
    """Explicit path, then $PBSIFT_CONFIG, then the per-user default if it exists"""
    if path is not None:
        return Path(path)
    env_path = os.environ.get(CONFIG_ENV_VAR)
    if env_path:
        return Path(env_path)
    candidate = default_config_path()
    return candidate if candidate.exists() else None


def load_settings(path: Optional[Path] = None) -> PbsiftSettings:
    """Load settings, falling back to defaults when no file is configured

    Raises:
        ConfigError: If the file is missing, unreadable or invalid
    """
    config_path = resolve_config_path(path)
    if config_path is None:
        return PbsiftSettings()
    try:
        with open(config_path, "r") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"configuration file not found: {config_path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {config_path}: {e}") from e
    return settings_from_dict(dict(data) if isinstance(data, dict) else data)


def save_settings(settings: PbsiftSettings, path: Optional[Path] = None) -> Path:
    path = Path(path) if path is not None else default_config_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        yaml.safe_dump(settings.to_dict(), f, default_flow_style=False)
    return path
