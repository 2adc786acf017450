"""
Weight-preserving deterministic graph homomorphisms

Validation of edge maps, the letter maps f_i induced by a coloring onto the
Bernoulli graph, and enumeration of all colorings of a rho-uniform graph.

Words compose right to left: f_{i1 i2 ... in} = f_{i1} o f_{i2} o ... o f_{in},
so the rightmost letter is applied first.
"""

import time
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import permutations, product
from typing import Iterator, Mapping, Sequence

from loguru import logger

from ..utils.errors import GraphValidationError, HomomorphismError
from .graph import (
    GraphPath,
    Rho,
    StochasticGraph,
    bernoulli_graph,
    check_rho_uniform,
    paths,
    stringing,
    validate_path,
)

Word = tuple[str, ...]


@dataclass(frozen=True, eq=False)
class GraphHom:
    """A validated homomorphism `source` -> `target`; build it with check_hom."""

    source: StochasticGraph
    target: StochasticGraph
    edge_map: Mapping[str, str]
    vertex_map: Mapping[str, str]

    def __call__(self, edge_id: str) -> str:
        return self.edge_map[edge_id]

    def compose(self, first: "GraphHom") -> "GraphHom":
        """The homomorphism self o first (apply `first`, then self)."""
        if first.target.vertices != self.source.vertices or {
            e.id for e in first.target.edges
        } != set(self.edge_map):
            raise HomomorphismError("Cannot compose: target and source graphs differ")
        return check_hom(
            {edge: self.edge_map[image] for edge, image in first.edge_map.items()},
            first.source,
            self.target,
        )


def check_hom(
    edge_map: Mapping[str, str], source: StochasticGraph, target: StochasticGraph
) -> GraphHom:
    """
    Validate a candidate edge map as a weight-preserving deterministic homomorphism.

    Args:
        edge_map: Total map from source edge ids to target edge ids
        source: Domain graph G
        target: Codomain graph H

    Returns:
        The validated GraphHom with its derived vertex map

    Raises:
        HomomorphismError: If the map is partial, breaks the homomorphism law,
            changes a weight, is not a bijection on some G_u, or misses a vertex
    """
    missing = [e.id for e in source.edges if e.id not in edge_map]
    if missing:
        raise HomomorphismError(f"Edge map is not total; missing {missing[:5]}")

    vertex_map: dict[str, str] = {}

    def bind(vertex: str, image: str, edge_id: str) -> None:
        previous = vertex_map.setdefault(vertex, image)
        if previous != image:
            raise HomomorphismError(
                f"Vertex map inconsistent at {vertex!r} (edge {edge_id!r}): "
                f"{previous!r} vs {image!r}"
            )

    for edge in source.edges:
        try:
            image = target.edge(edge_map[edge.id])
        except GraphValidationError:
            raise HomomorphismError(
                f"Edge {edge.id!r} maps to unknown target edge {edge_map[edge.id]!r}"
            )
        if image.weight != edge.weight:
            raise HomomorphismError(
                f"Weight mismatch on {edge.id!r}: {edge.weight} vs {image.weight}"
            )
        bind(edge.src, image.src, edge.id)
        bind(edge.dst, image.dst, edge.id)

    for u in source.vertices:
        images = [edge_map[e.id] for e in source.out_edges[u]]
        expected = {e.id for e in target.out_edges[vertex_map[u]]}
        if len(images) != len(set(images)) or set(images) != expected:
            raise HomomorphismError(
                f"Restriction to the out-edges of {u!r} is not a bijection onto "
                f"the out-edges of {vertex_map[u]!r}"
            )

    unreached = set(target.vertices) - set(vertex_map.values())
    if unreached:
        raise HomomorphismError(f"Vertex map is not surjective; misses {sorted(unreached)}")

    return GraphHom(source, target, dict(edge_map), vertex_map)


def identity_hom(g: StochasticGraph) -> GraphHom:
    return check_hom({e.id: e.id for e in g.edges}, g, g)


def coloring_from_labels(
    g: StochasticGraph, rho: Rho, labels: Mapping[str, str]
) -> GraphHom:
    """The coloring g -> (I, rho) given by an edge labeling."""
    return check_hom(labels, g, bernoulli_graph(rho))


def stringing_projection(g: StochasticGraph, n: int) -> GraphHom:
    """pi^(n): G^(n) -> G sending the n-path g1...gn to g1 (degree 1)."""
    strung = stringing(g, n)
    if n == 1:
        return check_hom({e.id: e.id for e in g.edges}, strung, g)
    edge_map = {".".join(path): path[0] for path in paths(g, n)}
    return check_hom(edge_map, strung, g)


@dataclass(frozen=True)
class LetterMaps:
    """
    The generators f_i of S(phi) on a vertex set U.

    `table[k][u]` is the index of f_{letters[k]}(vertices[u]); `edges[k][u]`
    is the id of the unique edge g_{i,u} with s(g) = u and phi(g) = i (or an
    empty string when the maps were built without a graph).
    """

    letters: tuple[str, ...]
    vertices: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[str, ...], ...] = field(default=(), compare=False)

    @classmethod
    def from_functions(
        cls,
        letters: Sequence[str],
        vertices: Sequence[str],
        maps: Mapping[str, Mapping[str, str]],
    ) -> "LetterMaps":
        """Build letter maps from explicit vertex functions (no source edges)."""
        index = {v: k for k, v in enumerate(vertices)}
        try:
            table = tuple(
                tuple(index[maps[letter][v]] for v in vertices) for letter in letters
            )
        except KeyError as missing:
            raise HomomorphismError(f"Letter maps are not total: {missing}")
        return cls(tuple(letters), tuple(vertices), table)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def letter_index(self, letter: str) -> int:
        try:
            return self.letters.index(letter)
        except ValueError:
            raise HomomorphismError(f"Unknown letter: {letter!r}")

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {v: k for k, v in enumerate(self.vertices)}

    def vertex_index(self, vertex: str) -> int:
        try:
            return self._positions[vertex]
        except KeyError:
            raise HomomorphismError(f"Unknown vertex: {vertex!r}")

    def image(self, letter: str, vertex: str) -> str:
        k = self.letter_index(letter)
        return self.vertices[self.table[k][self.vertex_index(vertex)]]

    def edge_of(self, letter: str, vertex: str) -> str:
        return self.edges[self.letter_index(letter)][self.vertex_index(vertex)]

    def as_functions(self) -> dict[str, dict[str, str]]:
        return {
            letter: {v: self.vertices[row[k]] for k, v in enumerate(self.vertices)}
            for letter, row in zip(self.letters, self.table)
        }


def letter_maps(phi: GraphHom) -> LetterMaps:
    """
    The letter maps f_i u = t(g_{i,u}) of a coloring.

    Raises:
        HomomorphismError: If the target is not a one-vertex graph
    """
    if len(phi.target.vertices) != 1:
        raise HomomorphismError("Letter maps need a coloring onto a one-vertex graph")
    letters = tuple(e.id for e in phi.target.edges)
    g = phi.source
    index = g.vertex_index
    table = []
    edges = []
    for letter in letters:
        row = []
        edge_row = []
        for u in g.vertices:
            edge = next(e for e in g.out_edges[u] if phi.edge_map[e.id] == letter)
            row.append(index[edge.dst])
            edge_row.append(edge.id)
        table.append(tuple(row))
        edges.append(tuple(edge_row))
    return LetterMaps(letters, g.vertices, tuple(table), tuple(edges))


def apply_word(lm: LetterMaps, word: Sequence[str], u: str) -> str:
    """f_{i1} o ... o f_{in}(u), applying the rightmost letter first."""
    position = lm.vertex_index(u)
    for letter in reversed(tuple(word)):
        position = lm.table[lm.letter_index(letter)][position]
    return lm.vertices[position]


def factor_prefix(phi: GraphHom, path: Sequence[str]) -> GraphPath:
    """The edgewise image of a source path (the finite-prefix action of the factor map)."""
    validate_path(phi.source, path)
    return tuple(phi.edge_map[edge_id] for edge_id in path)


def format_word(word: Sequence[str]) -> str:
    """Single-character letters are concatenated, longer ones joined by spaces."""
    if all(len(letter) == 1 for letter in word):
        return "".join(word)
    return " ".join(word)


class ColoringEnumeration:
    """
    Lazy stream of all colorings g -> (I, rho), honoring a budget.

    Per vertex the admissible choices are the weight-class-respecting
    bijections G_u -> I, enumerated as products of within-class
    permutations in lexicographic order. After iteration, `truncated` tells
    whether the budget cut the stream short.
    """

    def __init__(
        self,
        g: StochasticGraph,
        rho: Rho,
        budget: int = 1_000_000,
        time_limit: float = 0.0,
    ):
        if not check_rho_uniform(g, rho):
            raise HomomorphismError("Graph is not rho-uniform; it has no coloring")
        self.graph = g
        self.rho = rho
        self.budget = budget
        self.time_limit = time_limit
        self.emitted = 0
        self.truncated = False
        self._target = bernoulli_graph(rho)
        self._choices = [self._vertex_choices(u) for u in g.vertices]
        self.total = 1
        for choices in self._choices:
            self.total *= len(choices)

    def _vertex_choices(self, u: str) -> list[dict[str, str]]:
        classes = []
        for weight, letters in self.rho.weight_classes():
            edges = [e.id for e in self.graph.out_edges[u] if e.weight == weight]
            classes.append([dict(zip(edges, order)) for order in permutations(letters)])
        choices = []
        for combination in product(*classes):
            merged: dict[str, str] = {}
            for part in combination:
                merged.update(part)
            choices.append(merged)
        return choices

    def __iter__(self) -> Iterator[GraphHom]:
        started = time.monotonic()
        for combination in product(*self._choices):
            if self.emitted >= self.budget or (
                self.time_limit and time.monotonic() - started > self.time_limit
            ):
                self.truncated = self.emitted < self.total
                if self.truncated:
                    logger.warning(
                        f"Coloring enumeration truncated after {self.emitted} of {self.total}"
                    )
                return
            edge_map: dict[str, str] = {}
            for part in combination:
                edge_map.update(part)
            self.emitted += 1
            yield check_hom(edge_map, self.graph, self._target)


def enumerate_colorings(
    g: StochasticGraph, rho: Rho, budget: int = 1_000_000, time_limit: float = 0.0
) -> ColoringEnumeration:
    """All homomorphisms g -> (I, rho), up to `budget` of them."""
    return ColoringEnumeration(g, rho, budget, time_limit)


def pushforward(phi: GraphHom, stationary: Mapping[str, Fraction]) -> dict[str, Fraction]:
    """Sum of p(g) p0(s(g)) over each fiber phi^-1(h)."""
    mass: dict[str, Fraction] = {e.id: Fraction(0) for e in phi.target.edges}
    for edge in phi.source.edges:
        mass[phi.edge_map[edge.id]] += edge.weight * stationary[edge.src]
    return mass


def edge_fiber_sizes(phi: GraphHom) -> dict[str, int]:
    sizes = {e.id: 0 for e in phi.target.edges}
    for image in phi.edge_map.values():
        sizes[image] += 1
    return sizes


__all__ = [
    "ColoringEnumeration",
    "GraphHom",
    "LetterMaps",
    "Word",
    "apply_word",
    "check_hom",
    "coloring_from_labels",
    "edge_fiber_sizes",
    "enumerate_colorings",
    "factor_prefix",
    "format_word",
    "identity_hom",
    "letter_maps",
    "pushforward",
    "stringing_projection",
]
