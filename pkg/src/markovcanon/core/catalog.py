"""
Fixture families

Small graphs and extensions with known answers: the finite Drunkard's Ruin
and its Z2 extension, Bernoulli extensions, a 2-cycle, two disjoint loops
and random relabelings.
"""

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from ..utils.errors import GraphValidationError
from ..utils.permutation import Permutation
from .extension import GspExtension, base_edge, build_gsp, letter_graph
from .graph import BERNOULLI_VERTEX, Edge, Rho, StochasticGraph, relabeled
from .homomorphism import GraphHom, LetterMaps, coloring_from_labels

HOMOGENEOUS = Rho(("0", "1"), (Fraction(1, 2), Fraction(1, 2)))


@dataclass(frozen=True)
class LabeledGraph:
    """A graph with its Bernoulli distribution and a coloring given as edge labels."""

    graph: StochasticGraph
    rho: Rho
    labels: dict[str, str]

    def coloring(self) -> GraphHom:
        return coloring_from_labels(self.graph, self.rho, self.labels)


def drunkard_rho(p: Fraction = Fraction(1, 3)) -> Rho:
    """Letter 1 steps up with probability p, letter 0 steps down with q = 1 - p."""
    p = Fraction(p)
    if not 0 < p < 1:
        raise GraphValidationError(f"Step probability must lie in (0, 1), got {p}")
    return Rho(("0", "1"), (1 - p, p))


def drunkard_maps(n: int) -> LetterMaps:
    """f_1 j = min(j + 1, n) and f_0 j = max(j - 1, 1) on the states 1..n."""
    if n < 1:
        raise GraphValidationError(f"Drunkard's Ruin needs at least one state, got {n}")
    states = [str(j) for j in range(1, n + 1)]
    maps = {
        "0": {str(j): str(max(j - 1, 1)) for j in range(1, n + 1)},
        "1": {str(j): str(min(j + 1, n)) for j in range(1, n + 1)},
    }
    return LetterMaps.from_functions(("0", "1"), states, maps)


def drunkard_ruin(n: int, p: Fraction = Fraction(1, 3)) -> LabeledGraph:
    """The finite Drunkard's Ruin on n states; edge `i:j` leaves j with letter i."""
    rho = drunkard_rho(p)
    base = drunkard_maps(n)
    graph = letter_graph(base, rho)
    graph = StochasticGraph(graph.vertices, graph.edges, name=f"drunkard-{n}")
    labels = {base_edge(letter, j): letter for letter in base.letters for j in base.vertices}
    return LabeledGraph(graph, rho, labels)


def drunkard_z2_extension(n: int, p: Fraction = Fraction(1, 3)) -> GspExtension:
    """The Z2 extension whose cocycle swaps the fiber on the up-step from state 1 only."""
    base = drunkard_maps(n)
    swap = Permutation.transposition(2, 0, 1)
    identity = Permutation.identity(2)
    cocycle = {
        (letter, j): swap if (letter, j) == ("1", "1") else identity
        for letter in base.letters
        for j in base.vertices
    }
    return build_gsp(base, drunkard_rho(p), cocycle, 2)


def bernoulli_extension(
    rho: Rho, perms: Union[Sequence[Permutation], Mapping[str, Permutation]]
) -> GspExtension:
    """
    The d-extension of the Bernoulli graph with a(i) = perms[i].

    Raises:
        GraphValidationError: If the permutations do not match the letters or degrees
    """
    if isinstance(perms, Mapping):
        values = [perms[letter] for letter in rho.letters]
    else:
        values = list(perms)
    if len(values) != len(rho.letters):
        raise GraphValidationError(f"Need {len(rho.letters)} permutations, got {len(values)}")
    degrees = {perm.degree for perm in values}
    if len(degrees) != 1:
        raise GraphValidationError(f"Permutations have different degrees: {sorted(degrees)}")
    base = LetterMaps.from_functions(
        rho.letters,
        (BERNOULLI_VERTEX,),
        {letter: {BERNOULLI_VERTEX: BERNOULLI_VERTEX} for letter in rho.letters},
    )
    cocycle = {(letter, BERNOULLI_VERTEX): perm for letter, perm in zip(rho.letters, values)}
    return build_gsp(base, rho, cocycle, degrees.pop())


def two_cycle(rho: Rho = HOMOGENEOUS) -> LabeledGraph:
    """Vertices a and b, every edge crosses over; the period is 2."""
    edges = []
    labels = {}
    for src, dst in (("a", "b"), ("b", "a")):
        for letter, weight in zip(rho.letters, rho.weights):
            edge_id = f"{src}{letter}"
            edges.append(Edge(edge_id, src, dst, weight))
            labels[edge_id] = letter
    return LabeledGraph(StochasticGraph(("a", "b"), tuple(edges), name="two-cycle"), rho, labels)


def disjoint_loops() -> StochasticGraph:
    """Two vertices, one loop each: valid but reducible."""
    return StochasticGraph(
        ("a", "b"),
        (Edge("la", "a", "a", Fraction(1)), Edge("lb", "b", "b", Fraction(1))),
        name="disjoint-loops",
    )


@dataclass(frozen=True)
class Relabeling:
    """A renamed, reordered copy of a graph and the renaming used."""

    graph: StochasticGraph
    vertex_names: dict[str, str]
    edge_names: dict[str, str]

    def labels(self, labels: Mapping[str, str]) -> dict[str, str]:
        """Transport an edge labeling of the original graph."""
        return {self.edge_names[edge]: letter for edge, letter in labels.items()}


def random_relabeling(g: StochasticGraph, seed: Optional[int] = None) -> Relabeling:
    """Shuffle vertex and edge order and rename them `v<k>` / `e<k>`."""
    rng = random.Random(seed)
    vertex_order = list(g.vertices)
    edge_order = [edge.id for edge in g.edges]
    rng.shuffle(vertex_order)
    rng.shuffle(edge_order)
    vertex_names = {v: f"v{k}" for k, v in enumerate(vertex_order)}
    edge_names = {e: f"e{k}" for k, e in enumerate(edge_order)}
    graph = relabeled(g, vertex_names, edge_names, vertex_order, edge_order)
    return Relabeling(graph, vertex_names, edge_names)


__all__ = [
    "HOMOGENEOUS",
    "LabeledGraph",
    "Relabeling",
    "bernoulli_extension",
    "disjoint_loops",
    "drunkard_maps",
    "drunkard_rho",
    "drunkard_ruin",
    "drunkard_z2_extension",
    "random_relabeling",
    "two_cycle",
]
