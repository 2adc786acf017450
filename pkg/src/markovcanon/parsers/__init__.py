"""File formats for markovcanon."""

from .certificate import emit_certificate, emit_hom, parse_certificate, parse_hom
from .sgf import (
    SgfDocument,
    emit_coloring,
    emit_gsp,
    emit_reduction,
    emit_sgf,
    parse_gsp,
    parse_sgf,
)

__all__ = [
    "SgfDocument",
    "emit_certificate",
    "emit_coloring",
    "emit_gsp",
    "emit_hom",
    "emit_reduction",
    "emit_sgf",
    "parse_certificate",
    "parse_gsp",
    "parse_hom",
    "parse_sgf",
]
