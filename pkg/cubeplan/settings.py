"""
Runtime configuration: defaults, optional YAML file, then environment.
"""

import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field

ENV_PREFIX = "CUBEPLAN_"
DEFAULT_CONFIG_FILE = "cubeplan.yaml"


class Settings(BaseModel):
    resource_limit: int = Field(default=10_000_000, ge=1,
                                description="Ceiling on enumerated ideals, arm states and complex vertices")
    log_level: str = Field(default="WARNING", description="Level for the cubeplan loggers")
    frame_digits: int = Field(default=4, ge=1, description="Zero padding of animation frame file names")


def _read_yaml(path: Path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a mapping of settings")
    return data


def load_settings(config_path: Optional[str] = None) -> Settings:
    """Build settings from defaults, the YAML file and CUBEPLAN_* variables."""
    _ = load_dotenv()

    values: Dict[str, Any] = {}
    path = config_path or os.getenv(ENV_PREFIX + "CONFIG")
    if path:
        values.update(_read_yaml(Path(path)))
    elif Path(DEFAULT_CONFIG_FILE).is_file():
        values.update(_read_yaml(Path(DEFAULT_CONFIG_FILE)))

    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw.strip():
            values[name] = raw.strip()

    return Settings(**values)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()


def reset_settings() -> None:
    get_settings.cache_clear()


def resource_limit(override: Optional[int] = None) -> int:
    if override is not None:
        return override
    return get_settings().resource_limit
