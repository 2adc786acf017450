"""
File utilities for markovcanon

Reading inputs and writing certificate sidecar files.
"""

from pathlib import Path
from typing import Optional

from loguru import logger


def read_text_file(file_path: Path, encoding: str = "utf-8") -> str:
    """
    Read a whole text file.

    Raises:
        ValueError: If the file cannot be read or decoded
    """
    try:
        with open(file_path, "r", encoding=encoding) as f:
            return f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise ValueError(f"Cannot read {file_path}: {e}")


def safe_write_file(file_path: Path, content: str, encoding: str = "utf-8") -> bool:
    """
    Write content to a file, creating parent directories.

    Returns:
        True if successful, False otherwise
    """
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding=encoding) as f:
            f.write(content)
        logger.debug(f"Wrote {file_path}")
        return True
    except Exception as e:
        logger.error(f"Failed to write file {file_path}: {e}")
        return False


def sidecar_path(source: Path, suffix: str, directory: Optional[Path] = None) -> Path:
    """`<stem><suffix>` next to `source`, or inside `directory` when given."""
    parent = directory if directory is not None else source.parent
    return parent / f"{source.stem}{suffix}"
