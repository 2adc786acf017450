"""
Configuration management for markovcanon

Defaults come from the packaged default.yaml, then a user YAML file, then
MARKOVCANON_* environment variables (`__` separates nested keys).
"""

import copy
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Optional

import yaml
from loguru import logger

ENV_PREFIX = "MARKOVCANON_"


class Config:
    """Configuration manager with defaults and dot-key access."""

    DEFAULT_CONFIG = {
        "search": {
            "n_max": 8,
            "coloring_budget": 1_000_000,
            "coloring_time_limit": 0,
            "subset_budget": 2**20,
            "persistent_budget": 2**20,
            "d_max": 6,
            "accept_budgeted_minimality": False,
            "jobs": 1,
        },
        "simulate": {
            "seed": 0,
            "length": 100_000,
            "burn_in": 64,
        },
        "output": {
            "mode": "human",
            "certificate_dir": None,
        },
        "logging": {
            "level": "INFO",
            "format": "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{message}</cyan>",
        },
    }

    def __init__(self, config_dict: Optional[dict[str, Any]] = None):
        """
        Initialize configuration with defaults and overrides.

        Args:
            config_dict: Dictionary with configuration overrides
        """
        self.config = copy.deepcopy(self.DEFAULT_CONFIG)

        if config_dict:
            _merge_dicts(self.config, config_dict)

        self.search = self.config["search"]
        self.simulate = self.config["simulate"]
        self.output = self.config["output"]
        self.logging = self.config["logging"]

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value by dot-separated key.

        Args:
            key: Dot-separated key (e.g., 'search.n_max')
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        value: Any = self.config
        for k in key.split("."):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def set(self, key: str, value: Any) -> None:
        """Set a value by dot-separated key, creating sections as needed."""
        keys = key.split(".")
        section = self.config
        for k in keys[:-1]:
            section = section.setdefault(k, {})
        section[keys[-1]] = value

    def search_settings(self) -> "SearchSettings":
        return SearchSettings.from_config(self)

    def to_dict(self) -> dict[str, Any]:
        """Return the full configuration as a dictionary."""
        return copy.deepcopy(self.config)


@dataclass(frozen=True)
class SearchSettings:
    """Typed view of the `search` section handed to the classification pipeline."""

    n_max: int = 8
    coloring_budget: int = 1_000_000
    coloring_time_limit: float = 0.0
    subset_budget: int = 2**20
    persistent_budget: int = 2**20
    d_max: int = 6
    accept_budgeted_minimality: bool = False
    jobs: int = 1

    @classmethod
    def from_config(cls, config: Config) -> "SearchSettings":
        search = config.search
        return cls(
            n_max=int(search["n_max"]),
            coloring_budget=int(search["coloring_budget"]),
            coloring_time_limit=float(search.get("coloring_time_limit") or 0),
            subset_budget=int(search["subset_budget"]),
            persistent_budget=int(search["persistent_budget"]),
            d_max=int(search["d_max"]),
            accept_budgeted_minimality=bool(search["accept_budgeted_minimality"]),
            jobs=int(search.get("jobs") or 1),
        )

    def echo(self) -> list[tuple[str, Any]]:
        """Settings as report pairs `config.<key>`."""
        return [(f"config.{key}", value) for key, value in asdict(self).items()]


def load_config(config_file: Optional[Path] = None) -> dict[str, Any]:
    """
    Load configuration from YAML file.

    Args:
        config_file: Path to configuration file

    Returns:
        Configuration dictionary
    """
    config_dict: dict[str, Any] = {}

    default_config_path = Path(__file__).parent.parent / "config" / "default.yaml"

    if default_config_path.exists():
        try:
            with open(default_config_path, "r", encoding="utf-8") as f:
                config_dict = yaml.safe_load(f) or {}
            logger.debug(f"Loaded default config from {default_config_path}")
        except Exception as e:
            logger.warning(f"Could not load default config: {e}")

    if config_file:
        with open(config_file, "r", encoding="utf-8") as f:
            user_config = yaml.safe_load(f) or {}
        if not isinstance(user_config, dict):
            raise ValueError(f"Configuration file {config_file} must hold a mapping")
        _merge_dicts(config_dict, user_config)
        logger.info(f"Loaded user config from {config_file}")

    env_config = _load_env_config()
    if env_config:
        _merge_dicts(config_dict, env_config)
        logger.info("Applied environment variable configuration")

    return config_dict


def _merge_dicts(base: dict[str, Any], override: dict[str, Any]) -> None:
    """
    Recursively merge two dictionaries.

    Args:
        base: Base dictionary (modified in place)
        override: Dictionary to merge into base
    """
    for key, value in override.items():
        if key in base and isinstance(base[key], dict) and isinstance(value, dict):
            _merge_dicts(base[key], value)
        else:
            base[key] = value


def _load_env_config() -> dict[str, Any]:
    """
    Load configuration from environment variables.

    Variables are prefixed with MARKOVCANON_ and use double underscores
    for nested keys, e.g. MARKOVCANON_SEARCH__N_MAX=4.

    Returns:
        Configuration dictionary from environment variables
    """
    env_config: dict[str, Any] = {}

    for env_var, value in os.environ.items():
        if not env_var.startswith(ENV_PREFIX):
            continue
        keys = env_var[len(ENV_PREFIX):].lower().split("__")
        current = env_config
        for key in keys[:-1]:
            current = current.setdefault(key, {})
        current[keys[-1]] = _convert_env_value(value)

    return env_config


def _convert_env_value(value: str) -> Any:
    """
    Convert environment variable string to appropriate Python type.

    Args:
        value: Environment variable value as string

    Returns:
        Converted value
    """
    if value.lower() in ("true", "false"):
        return value.lower() == "true"

    if value.lower() in ("null", "none"):
        return None

    try:
        if "." in value:
            return float(value)
        return int(value)
    except ValueError:
        pass

    if "," in value:
        return [item.strip() for item in value.split(",")]

    return value
