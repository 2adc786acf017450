"""
Validation utilities for markovcanon

Input files and configuration are checked here before any graph is built.
"""

import os
from pathlib import Path
from typing import Any

from loguru import logger

OUTPUT_MODES = ("human", "report")

_POSITIVE_SEARCH_KEYS = (
    "n_max",
    "coloring_budget",
    "subset_budget",
    "persistent_budget",
    "d_max",
    "jobs",
)


def validate_input_file(file_path: Path) -> bool:
    """
    Validate that a path names a readable file.

    Args:
        file_path: Path to validate

    Returns:
        True if valid, raises exception otherwise

    Raises:
        ValueError: If path is not valid
    """
    if not file_path:
        raise ValueError("Input path cannot be empty")

    if not file_path.exists():
        raise ValueError(f"Input file does not exist: {file_path}")

    if not file_path.is_file():
        raise ValueError(f"Input path is not a file: {file_path}")

    if not os.access(file_path, os.R_OK):
        raise ValueError(f"No read permission for input file: {file_path}")

    if file_path.stat().st_size == 0:
        logger.warning(f"Input file is empty: {file_path}")

    logger.debug(f"Validated input file: {file_path}")
    return True


def validate_output_dir(output_dir: Path) -> bool:
    """
    Validate that certificate files can be written into a directory.

    Raises:
        ValueError: If the directory cannot be created or written
    """
    if output_dir.exists() and not output_dir.is_dir():
        raise ValueError(f"Output path is a file, not a directory: {output_dir}")
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except Exception as e:
        raise ValueError(f"Cannot create output directory: {e}")
    if not os.access(output_dir, os.W_OK):
        raise ValueError(f"No write permission for output directory: {output_dir}")
    return True


def validate_configuration(config: dict[str, Any]) -> bool:
    """
    Validate configuration dictionary.

    Args:
        config: Configuration dictionary to validate

    Returns:
        True if valid, raises exception otherwise

    Raises:
        ValueError: If configuration is invalid
    """
    if not isinstance(config, dict):
        raise ValueError("Configuration must be a dictionary")

    search = config.get("search", {})
    for key in _POSITIVE_SEARCH_KEYS:
        if key in search:
            value = search[key]
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise ValueError(f"search.{key} must be a positive integer, got {value!r}")

    if "coloring_time_limit" in search:
        limit = search["coloring_time_limit"]
        if isinstance(limit, bool) or not isinstance(limit, (int, float)) or limit < 0:
            raise ValueError("search.coloring_time_limit must be a non-negative number")

    if "accept_budgeted_minimality" in search:
        if not isinstance(search["accept_budgeted_minimality"], bool):
            raise ValueError("search.accept_budgeted_minimality must be a boolean")

    simulate = config.get("simulate", {})
    for key in ("length", "burn_in", "seed"):
        if key in simulate:
            value = simulate[key]
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ValueError(f"simulate.{key} must be a non-negative integer")

    output = config.get("output", {})
    if "mode" in output and output["mode"] not in OUTPUT_MODES:
        raise ValueError(f"output.mode must be one of {', '.join(OUTPUT_MODES)}")

    logging_section = config.get("logging", {})
    if "level" in logging_section:
        level = str(logging_section["level"]).upper()
        if level not in ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"logging.level is not a loguru level: {logging_section['level']!r}")

    logger.debug("Configuration validation passed")
    return True
