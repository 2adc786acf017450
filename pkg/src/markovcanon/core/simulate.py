"""
Trajectory sampling and Monte-Carlo cross-checks

Randomness comes from SplitMix64, so a (seed, graph, length) triple gives
the same trajectory on every platform. A weighted choice compares one
64-bit draw u against the thresholds ceil(c_k * 2^64) of the exact
cumulative weights c_k; the bias per choice is below 2^-64.
"""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Iterable, Mapping, Optional, Sequence, Union

from loguru import logger

from ..utils.errors import GraphValidationError
from .extension import GspExtension, extended_letter_maps
from .graph import (
    GraphPath,
    Rho,
    StochasticGraph,
    bernoulli_graph,
    stationary_distribution,
)
from .homomorphism import LetterMaps

_MASK = (1 << 64) - 1
_GRID = 1 << 64


class SplitMix64:
    """The SplitMix64 generator: state += golden gamma, then two xor-shift-multiply rounds."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)


def _thresholds(weights: Sequence[Fraction]) -> tuple[int, ...]:
    cumulative = Fraction(0)
    limits = []
    for weight in weights:
        cumulative += weight
        limits.append(ceil(cumulative * _GRID))
    return tuple(limits)


def _choose(rng: SplitMix64, thresholds: Sequence[int]) -> int:
    u = rng.next()
    for k, limit in enumerate(thresholds):
        if u < limit:
            return k
    return len(thresholds) - 1


@dataclass(frozen=True)
class TrajectorySample:
    """
    A sampled path prefix.

    `edges` follows the backward convention: edges[0] is the most recent
    edge and edges[-1] the first one traversed.
    """

    seed: int
    graph: StochasticGraph
    edges: GraphPath

    @property
    def length(self) -> int:
        return len(self.edges)

    def forward(self) -> GraphPath:
        """Edges in traversal order."""
        return tuple(reversed(self.edges))

    def letters(self, labels: Mapping[str, str]) -> tuple[str, ...]:
        """The letter stream of the sample under a coloring, in traversal order."""
        return tuple(labels[edge] for edge in self.forward())


def sample(g: StochasticGraph, seed: int, length: int) -> TrajectorySample:
    """
    Sample a path of `length` edges.

    The initial vertex is drawn from the exact stationary distribution,
    every later edge from G_u by weight.

    Raises:
        GraphValidationError: If g is reducible or length is negative
    """
    if length < 0:
        raise GraphValidationError(f"Sample length must be non-negative, got {length}")
    stationary = stationary_distribution(g)
    rng = SplitMix64(seed)
    vertex = g.vertices[_choose(rng, _thresholds([stationary[v] for v in g.vertices]))]
    choices = {
        v: (g.out_edges[v], _thresholds([e.weight for e in g.out_edges[v]])) for v in g.vertices
    }
    traversed = []
    for _ in range(length):
        edges, thresholds = choices[vertex]
        edge = edges[_choose(rng, thresholds)]
        traversed.append(edge.id)
        vertex = edge.dst
    logger.debug(f"Sampled {length} edges of {g.name or 'graph'} with seed {seed}")
    return TrajectorySample(seed, g, tuple(reversed(traversed)))


def sample_letters(rho: Rho, seed: int, length: int) -> tuple[str, ...]:
    """An i.i.d. rho letter stream, drawn as a walk on the Bernoulli graph."""
    return sample(bernoulli_graph(rho), seed, length).forward()


def empirical_cylinder(trajectory: TrajectorySample, path: Sequence[str]) -> float:
    """Sliding-window frequency of the backward path pattern `path`."""
    n = len(path)
    windows = trajectory.length - n + 1
    if n == 0 or windows <= 0:
        return 0.0
    pattern = tuple(path)
    edges = trajectory.edges
    hits = sum(1 for k in range(windows) if edges[k : k + n] == pattern)
    return hits / windows


def empirical_occupation(trajectory: TrajectorySample) -> dict[str, float]:
    """Fraction of steps leaving each vertex."""
    g = trajectory.graph
    counts = Counter(g.edge(edge).src for edge in trajectory.edges)
    total = max(trajectory.length, 1)
    return {v: counts[v] / total for v in g.vertices}


def empirical_fiber_collapse(
    maps: Union[GspExtension, LetterMaps], letters: Iterable[str]
) -> int:
    """
    Cardinality of the image of the whole vertex set after the letter stream.

    For a pair the extended maps on J x Y_d are used, so on a long random
    stream the result is the degree of the extension.
    """
    lm = extended_letter_maps(maps) if isinstance(maps, GspExtension) else maps
    current = set(range(lm.size))
    for letter in letters:
        row = lm.table[lm.letter_index(letter)]
        current = {row[u] for u in current}
    return len(current)


def empirical_pair_positivity(
    base1: LetterMaps,
    base2: LetterMaps,
    letters: Iterable[str],
    burn_in: int = 64,
) -> frozenset[tuple[str, str]]:
    """
    Pairs (j1, j2) visited by both automata on a shared letter stream.

    Each automaton tracks the image of its whole vertex set; pairs are
    recorded once both images are single points and at least `burn_in`
    letters were read.
    """
    image1 = set(range(base1.size))
    image2 = set(range(base2.size))
    observed = set()
    synchronized_at: Optional[int] = None
    for step, letter in enumerate(letters, start=1):
        row1 = base1.table[base1.letter_index(letter)]
        row2 = base2.table[base2.letter_index(letter)]
        image1 = {row1[u] for u in image1}
        image2 = {row2[u] for u in image2}
        if len(image1) == 1 and len(image2) == 1:
            if synchronized_at is None:
                synchronized_at = step
            if step >= burn_in:
                observed.add(
                    (base1.vertices[next(iter(image1))], base2.vertices[next(iter(image2))])
                )
    if synchronized_at is None:
        logger.warning("Letter stream never synchronized both automata")
    else:
        logger.debug(f"Synchronized after {synchronized_at} letters, {len(observed)} pairs")
    return frozenset(observed)


__all__ = [
    "SplitMix64",
    "TrajectorySample",
    "empirical_cylinder",
    "empirical_fiber_collapse",
    "empirical_occupation",
    "empirical_pair_positivity",
    "sample",
    "sample_letters",
]
