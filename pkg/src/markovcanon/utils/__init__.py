"""Utility modules for markovcanon."""

from .config import Config, SearchSettings, load_config
from .errors import MarkovCanonError
from .permutation import Permutation
from .rationals import format_rational, parse_rational
from .validators import validate_configuration, validate_input_file

__all__ = [
    "Config",
    "MarkovCanonError",
    "Permutation",
    "SearchSettings",
    "format_rational",
    "load_config",
    "parse_rational",
    "validate_configuration",
    "validate_input_file",
]
