"""
markovcanon - canonical forms for rho-uniform Markov shifts

Decides, with re-checkable certificates, whether two one-sided Markov
shifts given by finite stochastic graphs are isomorphic, by reducing each
to an irreducible skew-product extension at its minimal index.

Example:
    >>> from markovcanon.core.catalog import drunkard_ruin
    >>> from markovcanon.core import shifts_isomorphic
    >>> fixture = drunkard_ruin(3)
    >>> verdict = shifts_isomorphic(fixture.graph, fixture.graph, fixture.rho)
    >>> verdict.status.value
    'yes'
"""

__version__ = "0.1.0"
__license__ = "MIT"

from .core import (
    Rho,
    StochasticGraph,
    canonical_form,
    minimal_index,
    shifts_isomorphic,
)
from .utils import Config, load_config

__all__ = [
    "Config",
    "Rho",
    "StochasticGraph",
    "canonical_form",
    "load_config",
    "minimal_index",
    "shifts_isomorphic",
]
