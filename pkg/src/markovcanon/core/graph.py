"""
Stochastic graphs

Exact representation, validation and Markov-chain analysis of finite
stochastic graphs, together with the n-stringing construction.

Paths follow the backward convention: in g1 g2 ... gn we have
s(g_k) = t(g_{k+1}), so gn is traversed first and g1 last.
"""

from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import networkx as nx
from loguru import logger

from ..utils.errors import GraphValidationError

GraphPath = tuple[str, ...]

BERNOULLI_VERTEX = "o"


@dataclass(frozen=True)
class Edge:
    """A weighted edge from `src` to `dst`."""

    id: str
    src: str
    dst: str
    weight: Fraction


@dataclass(frozen=True)
class Rho:
    """The Bernoulli state space (I, rho): ordered letters with exact weights."""

    letters: tuple[str, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.letters:
            raise GraphValidationError("rho needs at least one letter")
        if len(self.letters) != len(self.weights):
            raise GraphValidationError("rho letters and weights differ in length")
        if len(set(self.letters)) != len(self.letters):
            raise GraphValidationError(f"Duplicate letter in rho: {list(self.letters)}")
        for letter, weight in zip(self.letters, self.weights):
            if weight <= 0:
                raise GraphValidationError(f"rho weight of {letter!r} must be positive")
        if sum(self.weights, Fraction(0)) != 1:
            raise GraphValidationError(
                f"rho weights sum to {sum(self.weights, Fraction(0))}, not 1"
            )

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Fraction]]) -> "Rho":
        items = list(pairs)
        return cls(
            tuple(letter for letter, _ in items),
            tuple(Fraction(weight) for _, weight in items),
        )

    def weight(self, letter: str) -> Fraction:
        try:
            return self.weights[self.letters.index(letter)]
        except ValueError:
            raise GraphValidationError(f"Unknown letter: {letter!r}")

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.letters, self.weights))

    def is_absolutely_non_homogeneous(self) -> bool:
        """All weights distinct: a rho-uniform graph then has exactly one coloring."""
        return len(set(self.weights)) == len(self.weights)

    def is_homogeneous(self) -> bool:
        return len(set(self.weights)) == 1

    def weight_classes(self) -> list[tuple[Fraction, tuple[str, ...]]]:
        """Letters grouped by equal weight, classes and members in letter order."""
        classes: dict[Fraction, list[str]] = {}
        for letter, weight in zip(self.letters, self.weights):
            classes.setdefault(weight, []).append(letter)
        return [(weight, tuple(letters)) for weight, letters in classes.items()]


@dataclass(frozen=True)
class StochasticGraph:
    """
    A finite weighted directed multigraph whose out-weights sum to 1.

    Vertex and edge iteration order is the construction order; every
    algorithm in the package is deterministic given that order.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.vertices:
            raise GraphValidationError("A graph needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            duplicates = [v for v, count in Counter(self.vertices).items() if count > 1]
            raise GraphValidationError(f"Duplicate vertex ids: {duplicates}")
        ids = [edge.id for edge in self.edges]
        if len(set(ids)) != len(ids):
            duplicates = [e for e, count in Counter(ids).items() if count > 1]
            raise GraphValidationError(f"Duplicate edge ids: {duplicates}")

        known = set(self.vertices)
        out_sum: dict[str, Fraction] = {v: Fraction(0) for v in self.vertices}
        in_count: Counter = Counter()
        for edge in self.edges:
            for end in (edge.src, edge.dst):
                if end not in known:
                    raise GraphValidationError(
                        f"Edge {edge.id!r} references unknown vertex {end!r}"
                    )
            if edge.weight <= 0:
                raise GraphValidationError(f"Edge {edge.id!r} has non-positive weight")
            out_sum[edge.src] += edge.weight
            in_count[edge.dst] += 1

        for vertex in self.vertices:
            if out_sum[vertex] == 0:
                raise GraphValidationError(f"Vertex {vertex!r} has no outgoing edge")
            if in_count[vertex] == 0:
                raise GraphValidationError(f"Vertex {vertex!r} has no incoming edge")
            if out_sum[vertex] != 1:
                raise GraphValidationError(
                    f"Out-weights of vertex {vertex!r} sum to {out_sum[vertex]}, not 1"
                )

    @cached_property
    def edge_by_id(self) -> dict[str, Edge]:
        return {edge.id: edge for edge in self.edges}

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {vertex: k for k, vertex in enumerate(self.vertices)}

    @cached_property
    def out_edges(self) -> dict[str, tuple[Edge, ...]]:
        """G_u for every vertex u, in edge order."""
        table: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for edge in self.edges:
            table[edge.src].append(edge)
        return {v: tuple(edges) for v, edges in table.items()}

    @cached_property
    def in_edges(self) -> dict[str, tuple[Edge, ...]]:
        """_vG for every vertex v, in edge order."""
        table: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for edge in self.edges:
            table[edge.dst].append(edge)
        return {v: tuple(edges) for v, edges in table.items()}

    def edge(self, edge_id: str) -> Edge:
        try:
            return self.edge_by_id[edge_id]
        except KeyError:
            raise GraphValidationError(f"Unknown edge: {edge_id!r}")

    def to_networkx(self) -> nx.MultiDiGraph:
        digraph = nx.MultiDiGraph()
        digraph.add_nodes_from(self.vertices)
        for edge in self.edges:
            digraph.add_edge(edge.src, edge.dst, key=edge.id, weight=edge.weight)
        return digraph


def bernoulli_graph(rho: Rho) -> StochasticGraph:
    """The one-vertex graph (I, rho); edge ids are the letters."""
    edges = tuple(
        Edge(letter, BERNOULLI_VERTEX, BERNOULLI_VERTEX, weight)
        for letter, weight in zip(rho.letters, rho.weights)
    )
    return StochasticGraph((BERNOULLI_VERTEX,), edges, name="bernoulli")


def is_irreducible(g: StochasticGraph) -> bool:
    """True iff the underlying directed graph is strongly connected."""
    return nx.is_strongly_connected(g.to_networkx())


def _require_irreducible(g: StochasticGraph) -> None:
    if not is_irreducible(g):
        raise GraphValidationError("Graph is reducible (not strongly connected)")


def period(g: StochasticGraph) -> int:
    """
    Period of an irreducible graph.

    Computed as the gcd of level(u) + 1 - level(v) over all edges u -> v,
    with BFS levels from the first vertex; this equals the gcd of the
    cycle lengths through any vertex.

    Raises:
        GraphValidationError: If the graph is reducible
    """
    _require_irreducible(g)
    root = g.vertices[0]
    level = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for edge in g.out_edges[u]:
            if edge.dst not in level:
                level[edge.dst] = level[u] + 1
                queue.append(edge.dst)
    differences = (abs(level[e.src] + 1 - level[e.dst]) for e in g.edges)
    return reduce(gcd, differences, 0)


def stationary_distribution(g: StochasticGraph) -> dict[str, Fraction]:
    """
    Exact stationary probabilities of an irreducible graph.

    Solves sum_{g in _vG} p(g) p0(s(g)) = p0(v) with sum p0 = 1 by rational
    Gaussian elimination on the (|G0|+1)-row augmented system, pivoting on
    the first nonzero entry in column order.

    Raises:
        GraphValidationError: If the graph is reducible
    """
    _require_irreducible(g)
    size = len(g.vertices)
    index = g.vertex_index

    rows: list[list[Fraction]] = []
    for v in g.vertices:
        row = [Fraction(0)] * (size + 1)
        for edge in g.in_edges[v]:
            row[index[edge.src]] += edge.weight
        row[index[v]] -= 1
        rows.append(row)
    rows.append([Fraction(1)] * size + [Fraction(1)])

    pivot_row = 0
    for column in range(size):
        pivot = next(
            (r for r in range(pivot_row, len(rows)) if rows[r][column] != 0), None
        )
        if pivot is None:
            raise GraphValidationError("Stationary distribution is not unique")
        rows[pivot_row], rows[pivot] = rows[pivot], rows[pivot_row]
        lead = rows[pivot_row][column]
        rows[pivot_row] = [entry / lead for entry in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][column] != 0:
                factor = rows[r][column]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[pivot_row])]
        pivot_row += 1

    solution = {v: rows[index[v]][size] for v in g.vertices}
    if any(value <= 0 for value in solution.values()):
        raise GraphValidationError("Stationary solution has non-positive entries")
    logger.debug(f"Stationary distribution solved for {size} vertices")
    return solution


def check_rho_uniform(g: StochasticGraph, rho: Rho) -> bool:
    """True iff every out-weight multiset equals the multiset of rho's weights."""
    target = Counter(rho.weights)
    return all(
        Counter(edge.weight for edge in g.out_edges[u]) == target for u in g.vertices
    )


def validate_path(g: StochasticGraph, path: Sequence[str]) -> tuple[Edge, ...]:
    """
    Resolve a backward path to its edges.

    Raises:
        GraphValidationError: If the path is empty, names an unknown edge,
            or two consecutive edges do not connect
    """
    if not path:
        raise GraphValidationError("A path has at least one edge")
    edges = tuple(g.edge(edge_id) for edge_id in path)
    for k in range(len(edges) - 1):
        if edges[k].src != edges[k + 1].dst:
            raise GraphValidationError(
                f"Edges {edges[k].id!r} and {edges[k + 1].id!r} do not form a backward path"
            )
    return edges


def paths(g: StochasticGraph, n: int) -> Iterator[GraphPath]:
    """All backward paths of length n, in lexicographic edge order."""
    if n < 1:
        return
    partial: list[tuple[Edge, ...]] = [(edge,) for edge in g.edges]
    for _ in range(n - 1):
        partial = [
            prefix + (edge,) for prefix in partial for edge in g.in_edges[prefix[-1].src]
        ]
    for path in partial:
        yield tuple(edge.id for edge in path)


def cylinder_measure(
    g: StochasticGraph,
    path: Sequence[str],
    stationary: Optional[Mapping[str, Fraction]] = None,
) -> Fraction:
    """Markov measure p(g1)...p(gn) p0(s(gn)) of the cylinder of a backward path."""
    edges = validate_path(g, path)
    if stationary is None:
        stationary = stationary_distribution(g)
    measure = stationary[edges[-1].src]
    for edge in edges:
        measure *= edge.weight
    return measure


def return_words(
    g: StochasticGraph, u: str, max_len: int
) -> list[tuple[GraphPath, Fraction]]:
    """
    First-return paths at u of length at most max_len.

    Each path g1...gn has t(g1) = s(gn) = u and visits u nowhere in between.
    Results are ordered by length, then by the order of the forward walk.
    """
    if u not in g.vertex_index:
        raise GraphValidationError(f"Unknown vertex: {u!r}")
    _require_irreducible(g)
    found: list[tuple[GraphPath, Fraction]] = []
    frontier: list[tuple[tuple[Edge, ...], Fraction]] = [((), Fraction(1))]
    for _ in range(max_len):
        extended: list[tuple[tuple[Edge, ...], Fraction]] = []
        for walk, weight in frontier:
            here = walk[-1].dst if walk else u
            for edge in g.out_edges[here]:
                step = (walk + (edge,), weight * edge.weight)
                if edge.dst == u:
                    found.append((tuple(e.id for e in reversed(step[0])), step[1]))
                else:
                    extended.append(step)
        frontier = extended
    return found


def stringing(g: StochasticGraph, n: int) -> StochasticGraph:
    """
    The n-stringing G^(n).

    Edges are the backward n-paths g1...gn; s = g2...gn, t = g1...g(n-1).
    The transition weight is p(g1), the edge traversed last, so G^(n) is
    stochastic and rho-uniform whenever G is. Path ids are edge ids joined
    by '.'. For n = 1 the result is a copy of G.
    """
    if n < 1:
        raise GraphValidationError(f"Stringing order must be positive, got {n}")
    if n == 1:
        return StochasticGraph(g.vertices, g.edges, name=f"{g.name or 'G'}^(1)")

    vertices = tuple(".".join(path) for path in paths(g, n - 1))
    edges = []
    for path in paths(g, n):
        first = g.edge(path[0])
        edges.append(
            Edge(".".join(path), ".".join(path[1:]), ".".join(path[:-1]), first.weight)
        )
    logger.debug(f"Stringing of order {n}: {len(vertices)} vertices, {len(edges)} edges")
    return StochasticGraph(vertices, tuple(edges), name=f"{g.name or 'G'}^({n})")


def relabeled(
    g: StochasticGraph,
    vertex_names: Mapping[str, str],
    edge_names: Mapping[str, str],
    vertex_order: Optional[Sequence[str]] = None,
    edge_order: Optional[Sequence[str]] = None,
) -> StochasticGraph:
    """A copy of g with renamed (and optionally reordered) vertices and edges."""
    vertices = tuple(vertex_order) if vertex_order is not None else g.vertices
    edge_ids = tuple(edge_order) if edge_order is not None else tuple(e.id for e in g.edges)
    edges = tuple(
        Edge(
            edge_names[edge_id],
            vertex_names[g.edge(edge_id).src],
            vertex_names[g.edge(edge_id).dst],
            g.edge(edge_id).weight,
        )
        for edge_id in edge_ids
    )
    return StochasticGraph(tuple(vertex_names[v] for v in vertices), edges, name=g.name)


def total_cylinder_mass(g: StochasticGraph, n: int) -> Fraction:
    """Sum of cylinder measures over all paths of length n (equals 1)."""
    stationary = stationary_distribution(g)
    return sum(
        (cylinder_measure(g, path, stationary) for path in paths(g, n)), Fraction(0)
    )


def cycle_lengths(g: StochasticGraph, root: str, max_len: int) -> set[int]:
    """Lengths of closed walks through `root` up to max_len (used as a period oracle)."""
    lengths = set()
    reachable = {root}
    for length in range(1, max_len + 1):
        reachable = {edge.dst for u in reachable for edge in g.out_edges[u]}
        if root in reachable:
            lengths.add(length)
    return lengths


__all__ = [
    "BERNOULLI_VERTEX",
    "Edge",
    "GraphPath",
    "Rho",
    "StochasticGraph",
    "bernoulli_graph",
    "check_rho_uniform",
    "cycle_lengths",
    "cylinder_measure",
    "is_irreducible",
    "paths",
    "period",
    "relabeled",
    "return_words",
    "stationary_distribution",
    "stringing",
    "total_cylinder_mass",
    "validate_path",
]
