"""Core algorithms: graphs, homomorphisms, contraction, extensions, reduction, classification."""

from .classify import (
    CanonicalForm,
    IsoStatus,
    IsoVerdict,
    canonical_form,
    common_extension_shifts,
    minimal_index,
    shifts_isomorphic,
)
from .graph import Rho, StochasticGraph, period, stationary_distribution
from .homomorphism import GraphHom, check_hom, letter_maps

__all__ = [
    "CanonicalForm",
    "GraphHom",
    "IsoStatus",
    "IsoVerdict",
    "Rho",
    "StochasticGraph",
    "canonical_form",
    "check_hom",
    "common_extension_shifts",
    "letter_maps",
    "minimal_index",
    "period",
    "shifts_isomorphic",
    "stationary_distribution",
]
