"""
Graph skew products and their persistent partitions

A GspExtension is a degree-1 base automaton (J, {f_i}) over the letters of
rho together with a permutation cocycle a(i, j) on the fiber Y_d. Its total
graph has vertices (j, y), written `j^y` with y 1-based, and edges
(i, j, y) -> (f_i j, a(i, j) y) of weight rho(i).

Base edges are named `i:j`, total-graph edges `i:j^y`.
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from loguru import logger

from ..utils.errors import ContractionError, ExtensionError
from ..utils.permutation import Permutation, is_transitive
from .contraction import ContractionReport, degree, persistent_set_indices, synchronizing_word
from .graph import Edge, Rho, StochasticGraph, bernoulli_graph, is_irreducible
from .homomorphism import GraphHom, LetterMaps, check_hom, letter_maps

Cocycle = Mapping[tuple[str, str], Permutation]


def fiber_vertex(vertex: str, y: int) -> str:
    """Name of the total-graph vertex over `vertex` at 0-based fiber point y."""
    return f"{vertex}^{y + 1}"


def base_edge(letter: str, j: str) -> str:
    return f"{letter}:{j}"


@dataclass(frozen=True)
class VertexPartition:
    """A partition of an ordered vertex set, kept in canonical order."""

    blocks: tuple[tuple[str, ...], ...]

    @classmethod
    def from_blocks(
        cls, blocks: Iterable[Iterable[str]], order: Sequence[str]
    ) -> "VertexPartition":
        position = {v: k for k, v in enumerate(order)}
        sorted_blocks = [tuple(sorted(block, key=position.__getitem__)) for block in blocks]
        sorted_blocks = [block for block in sorted_blocks if block]
        sorted_blocks.sort(key=lambda block: position[block[0]])
        covered = [v for block in sorted_blocks for v in block]
        if sorted(covered, key=position.__getitem__) != list(order):
            raise ExtensionError("Blocks do not form an exact cover of the vertex set")
        return cls(tuple(sorted_blocks))

    @classmethod
    def kernel(cls, order: Sequence[str], key: Mapping[str, object]) -> "VertexPartition":
        """The partition whose blocks are the level sets of `key`."""
        groups: dict[object, list[str]] = {}
        for v in order:
            groups.setdefault(key[v], []).append(v)
        return cls.from_blocks(groups.values(), order)

    @classmethod
    def singletons(cls, order: Sequence[str]) -> "VertexPartition":
        return cls(tuple((v,) for v in order))

    @classmethod
    def whole(cls, order: Sequence[str]) -> "VertexPartition":
        return cls((tuple(order),))

    @cached_property
    def block_index(self) -> dict[str, int]:
        return {v: k for k, block in enumerate(self.blocks) for v in block}

    def block_of(self, vertex: str) -> tuple[str, ...]:
        return self.blocks[self.block_index[vertex]]

    def is_discrete(self) -> bool:
        return all(len(block) == 1 for block in self.blocks)

    def refines(self, other: "VertexPartition") -> bool:
        """True iff every block of self lies inside one block of other."""
        return all(
            len({other.block_index[v] for v in block}) == 1 for block in self.blocks
        )

    def __len__(self) -> int:
        return len(self.blocks)


def letter_graph(base: LetterMaps, rho: Rho) -> StochasticGraph:
    """H = I x J with s(i, j) = j, t(i, j) = f_i j and p(i, j) = rho(i)."""
    edges = []
    for j_index, j in enumerate(base.vertices):
        for k, letter in enumerate(base.letters):
            target = base.vertices[base.table[k][j_index]]
            edges.append(Edge(base_edge(letter, j), j, target, rho.weights[k]))
    return StochasticGraph(base.vertices, tuple(edges), name="base")


@dataclass(frozen=True)
class GspExtension:
    """A (pi, psi)-pair: base letter maps over J plus a cocycle into A_d."""

    rho: Rho
    base: LetterMaps
    cocycle: tuple[tuple[Permutation, ...], ...]
    d: int

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.base.vertices

    def a(self, letter: str, j: str) -> Permutation:
        return self.cocycle[self.base.letter_index(letter)][self.base.vertex_index(j)]

    def cocycle_items(self) -> Iterable[tuple[str, str, Permutation]]:
        for k, letter in enumerate(self.base.letters):
            for u, j in enumerate(self.base.vertices):
                yield letter, j, self.cocycle[k][u]

    def cocycle_map(self) -> dict[tuple[str, str], Permutation]:
        return {(letter, j): perm for letter, j, perm in self.cocycle_items()}

    @cached_property
    def base_graph(self) -> StochasticGraph:
        return letter_graph(self.base, self.rho)

    def base_labels(self) -> dict[str, str]:
        return {
            base_edge(letter, j): letter
            for letter in self.base.letters
            for j in self.base.vertices
        }

    def psi(self) -> GraphHom:
        """The degree-1 coloring psi(i, j) = i of the base graph."""
        return check_hom(self.base_labels(), self.base_graph, bernoulli_graph(self.rho))

    @cached_property
    def _skew(self) -> tuple[StochasticGraph, GraphHom]:
        cocycle = {base_edge(letter, j): perm for letter, j, perm in self.cocycle_items()}
        return skew_product(self.base_graph, cocycle, self.d)

    def materialize(self) -> StochasticGraph:
        """The total graph H-bar."""
        return self._skew[0]

    def projection(self) -> GraphHom:
        """pi: H-bar -> H forgetting the fiber coordinate."""
        return self._skew[1]

    def total_labels(self) -> dict[str, str]:
        """The coloring psi o pi of H-bar as an edge labeling."""
        return {
            fiber_vertex(base_edge(letter, j), y): letter
            for letter, j, _ in self.cocycle_items()
            for y in range(self.d)
        }

    def is_irreducible(self) -> bool:
        if len(self.vertices) == 1:
            # one base vertex: the fiber group must be transitive
            return is_transitive([row[0] for row in self.cocycle], self.d)
        return is_irreducible(self.materialize())


def build_gsp(
    base: LetterMaps, rho: Rho, cocycle: Cocycle, d: int, check_base: bool = True
) -> GspExtension:
    """
    Assemble a GspExtension.

    Args:
        base: Letter maps f_i over J, letters in rho order
        rho: The Bernoulli distribution
        cocycle: a(i, j) for every letter i and base vertex j
        d: Fiber size
        check_base: Verify that the base maps synchronize

    Raises:
        ExtensionError: If the letters disagree with rho, the cocycle is not
            total or has the wrong degree, or the base is not 1-contractive
    """
    if base.letters != rho.letters:
        raise ExtensionError(
            f"Base letters {list(base.letters)} differ from rho letters {list(rho.letters)}"
        )
    if d < 1:
        raise ExtensionError(f"Fiber size must be positive, got {d}")
    rows = []
    for letter in base.letters:
        row = []
        for j in base.vertices:
            if (letter, j) not in cocycle:
                raise ExtensionError(f"Cocycle is not total: missing ({letter}, {j})")
            perm = cocycle[(letter, j)]
            if perm.degree != d:
                raise ExtensionError(
                    f"Cocycle value at ({letter}, {j}) has degree {perm.degree}, expected {d}"
                )
            row.append(perm)
        rows.append(tuple(row))
    if check_base and synchronizing_word(base) is None:
        raise ExtensionError("Base letter maps are not 1-contractive")
    return GspExtension(rho, base, tuple(rows), d)


def skew_product(
    h: StochasticGraph, cocycle: Mapping[str, Permutation], d: int
) -> tuple[StochasticGraph, GraphHom]:
    """
    The skew product H-bar of an arbitrary stochastic graph H.

    Edge (h, y) runs from (s(h), y) to (t(h), a(h) y) with weight p(h).

    Returns:
        The total graph and its projection onto H
    """
    vertices = tuple(fiber_vertex(v, y) for v in h.vertices for y in range(d))
    edges = []
    projection = {}
    for edge in h.edges:
        perm = cocycle[edge.id]
        for y in range(d):
            edge_id = fiber_vertex(edge.id, y)
            edges.append(
                Edge(
                    edge_id,
                    fiber_vertex(edge.src, y),
                    fiber_vertex(edge.dst, perm(y)),
                    edge.weight,
                )
            )
            projection[edge_id] = edge.id
    total = StochasticGraph(vertices, tuple(edges), name=f"{h.name or 'H'}-bar")
    return total, check_hom(projection, total, h)


@dataclass(frozen=True)
class GspNormalization:
    """A d-extension G -> H rewritten as a skew product over H."""

    cocycle: dict[str, Permutation]
    d: int
    fibers: dict[str, tuple[str, ...]]
    isomorphism: GraphHom


def gsp_normalize(phi: GraphHom) -> GspNormalization:
    """
    Rewrite a d-extension as a skew product.

    Fiber bijections w_u follow vertex order; a(h)(y) is the fiber position
    of t(g) for the unique g over h leaving the y-th point over s(h).

    Raises:
        ExtensionError: If fibers over vertices or edges have unequal sizes
    """
    g, h = phi.source, phi.target
    fibers: dict[str, list[str]] = {v: [] for v in h.vertices}
    for u in g.vertices:
        fibers[phi.vertex_map[u]].append(u)
    sizes = {len(members) for members in fibers.values()}
    if len(sizes) != 1:
        raise ExtensionError(f"Vertex fibers have unequal sizes: {sorted(sizes)}")
    d = sizes.pop()
    edge_sizes: dict[str, int] = {e.id: 0 for e in h.edges}
    for image in phi.edge_map.values():
        edge_sizes[image] += 1
    if set(edge_sizes.values()) != {d}:
        raise ExtensionError("Edge fibers do not all have size d")

    position = {u: fibers[phi.vertex_map[u]].index(u) for u in g.vertices}
    lifted = {
        (edge.src, phi.edge_map[edge.id]): edge for edge in g.edges
    }
    cocycle = {}
    for edge in h.edges:
        images = []
        for y in range(d):
            u = fibers[edge.src][y]
            images.append(position[lifted[(u, edge.id)].dst])
        cocycle[edge.id] = Permutation(tuple(images))

    total, _ = skew_product(h, cocycle, d)
    edge_map = {
        edge.id: fiber_vertex(phi.edge_map[edge.id], position[edge.src]) for edge in g.edges
    }
    isomorphism = check_hom(edge_map, g, total)
    if len(set(edge_map.values())) != len(total.edges):
        raise ExtensionError("Normalization map is not a bijection")
    logger.debug(f"Normalized a {d}-extension over {len(h.vertices)} vertices")
    return GspNormalization(
        cocycle, d, {v: tuple(members) for v, members in fibers.items()}, isomorphism
    )


def extended_letter_maps(e: GspExtension) -> LetterMaps:
    """The maps f-bar_i(j, y) = (f_i j, a(i, j) y) on J x Y_d."""
    d = e.d
    vertices = tuple(fiber_vertex(j, y) for j in e.vertices for y in range(d))
    table = []
    edges = []
    for k, letter in enumerate(e.base.letters):
        row = []
        edge_row = []
        for j_index, j in enumerate(e.vertices):
            target = e.base.table[k][j_index]
            perm = e.cocycle[k][j_index]
            for y in range(d):
                row.append(target * d + perm(y))
                edge_row.append(fiber_vertex(base_edge(letter, j), y))
        table.append(tuple(row))
        edges.append(tuple(edge_row))
    return LetterMaps(e.base.letters, vertices, tuple(table), tuple(edges))


@dataclass(frozen=True)
class LiftResult:
    """The (pi, psi)-pair built from a coloring, with its degree-1 homomorphisms."""

    extension: GspExtension
    psi_bar: GraphHom
    psi: GraphHom
    report: ContractionReport
    persistent_sets: tuple[tuple[str, ...], ...]


def lift_phi_bar(g: StochasticGraph, phi: GraphHom, budget: int = 2**20) -> LiftResult:
    """
    Lift a coloring phi of degree d to a skew product over a degree-1 base.

    J indexes the persistent d-sets L_j (`L1`, `L2`, ... in sorted order);
    f_i^J is defined by f_i(L_j) = L_{f_i^J j}. The intermediate graph on
    pairs (j, u) with u in L_j is normalized by vertex order, and the result
    is checked: psi and psi-bar are homomorphisms of degree 1 and
    phi o psi-bar = psi o pi edge by edge.

    Raises:
        ContractionError: If the contraction search was truncated
        ExtensionError: If a lift check fails
    """
    lm = letter_maps(phi)
    report = degree(lm, budget)
    if not report.exhausted:
        raise ContractionError("Contraction search truncated; the degree is not certified")
    sets = persistent_set_indices(lm, report)
    names = tuple(f"L{k + 1}" for k in range(len(sets)))
    index_of = {subset: k for k, subset in enumerate(sets)}

    table = []
    for row in lm.table:
        images = []
        for subset in sets:
            image = tuple(sorted({row[u] for u in subset}))
            if image not in index_of:
                raise ExtensionError("Persistent sets are not closed under the letter maps")
            images.append(index_of[image])
        table.append(tuple(images))
    base = LetterMaps(lm.letters, names, tuple(table))
    rho = Rho(lm.letters, tuple(e.weight for e in phi.target.edges))

    # pairs (j, u) with u in L_j, mapped onto the base graph
    h = letter_graph(base, rho)
    pair_vertices = []
    pair_edges = []
    pair_map = {}
    source_edge = {}
    for k, subset in enumerate(sets):
        for u in subset:
            pair_vertices.append(f"{names[k]}|{lm.vertices[u]}")
    for k, subset in enumerate(sets):
        for letter_index, letter in enumerate(lm.letters):
            target = names[table[letter_index][k]]
            for u in subset:
                image = lm.table[letter_index][u]
                edge_id = f"{letter}:{names[k]}|{lm.vertices[u]}"
                pair_edges.append(
                    Edge(
                        edge_id,
                        f"{names[k]}|{lm.vertices[u]}",
                        f"{target}|{lm.vertices[image]}",
                        rho.weights[letter_index],
                    )
                )
                pair_map[edge_id] = base_edge(letter, names[k])
                source_edge[edge_id] = lm.edges[letter_index][u]
    pairs = StochasticGraph(tuple(pair_vertices), tuple(pair_edges), name="pairs")
    normalization = gsp_normalize(check_hom(pair_map, pairs, h))

    cocycle = {
        (letter, j): normalization.cocycle[base_edge(letter, j)]
        for letter in base.letters
        for j in base.vertices
    }
    extension = build_gsp(base, rho, cocycle, report.degree)

    inverse = {image: edge for edge, image in normalization.isomorphism.edge_map.items()}
    total = extension.materialize()
    psi_bar = check_hom({e.id: source_edge[inverse[e.id]] for e in total.edges}, total, g)
    psi = extension.psi()

    projection = extension.projection()
    for edge in total.edges:
        if phi.edge_map[psi_bar.edge_map[edge.id]] != psi.edge_map[projection.edge_map[edge.id]]:
            raise ExtensionError(f"Lift diagram does not commute at {edge.id!r}")
    if degree(base, budget).degree != 1:
        raise ExtensionError("Lifted base is not 1-contractive")
    if degree(extended_letter_maps(extension), budget).degree != report.degree:
        raise ExtensionError("Lifted extension does not have the degree of the coloring")

    logger.info(
        f"Lifted coloring of degree {report.degree}: |J| = {len(names)}, "
        f"{len(total.vertices)} total vertices"
    )
    return LiftResult(
        extension,
        psi_bar,
        psi,
        report,
        tuple(tuple(lm.vertices[u] for u in subset) for subset in sets),
    )


@dataclass(frozen=True)
class PersistentFunction:
    """
    A persistent transversal partition encoded as c: J -> A_d.

    Normalized so that c(j0) is the identity for the first base vertex j0;
    the classes are R_y = {(j, c(j)^-1 y)}.
    """

    vertices: tuple[str, ...]
    values: tuple[Permutation, ...]

    def __call__(self, j: str) -> Permutation:
        return self.values[self.vertices.index(j)]


@dataclass(frozen=True)
class PersistentPartitionReport:
    functions: tuple[PersistentFunction, ...]
    exhausted: bool
    visited: int


def _normalize(values: Sequence[Permutation]) -> tuple[Permutation, ...]:
    shift = values[0].inverse()
    return tuple(shift * value for value in values)


def _append(e: GspExtension, letter_index: int, values: Sequence[Permutation]) -> list[Permutation]:
    """c'(j) = c(f_i j) a(i, j): the function of the word extended by letter i."""
    row = e.base.table[letter_index]
    cocycle_row = e.cocycle[letter_index]
    return [values[row[j]] * cocycle_row[j] for j in range(len(row))]


def persistent_partitions(e: GspExtension, budget: int = 2**20) -> PersistentPartitionReport:
    """
    All persistent transversal partitions of J x Y_d.

    Starts from the function of one synchronizing word and closes under
    appending letters; persistence makes that closure the whole set.
    Results are normalized and sorted by their image tuples.

    Raises:
        ExtensionError: If the base does not synchronize
    """
    word = synchronizing_word(e.base)
    if word is None:
        raise ExtensionError("Base letter maps are not 1-contractive")

    values = [Permutation.identity(e.d)] * len(e.vertices)
    for letter in word:
        values = _append(e, e.base.letter_index(letter), values)
    start = _normalize(values)

    seen = {start}
    queue = deque([start])
    exhausted = True
    while queue:
        current = queue.popleft()
        for letter_index in range(len(e.base.letters)):
            following = _normalize(_append(e, letter_index, current))
            if following in seen:
                continue
            if len(seen) >= budget:
                exhausted = False
                queue.clear()
                break
            seen.add(following)
            queue.append(following)

    if not exhausted:
        logger.warning(f"Persistent partition search truncated at {len(seen)} functions")
    functions = tuple(
        PersistentFunction(e.vertices, values)
        for values in sorted(seen, key=lambda vs: tuple(v.images for v in vs))
    )
    logger.debug(f"Found {len(functions)} persistent partitions")
    return PersistentPartitionReport(functions, exhausted, len(seen))


def partition_of(c: PersistentFunction, d: int) -> VertexPartition:
    """The transversal partition R_y = {(j, c(j)^-1 y)} of J x Y_d."""
    order = [fiber_vertex(j, y) for j in c.vertices for y in range(d)]
    blocks = [
        [fiber_vertex(j, value.inverse()(y)) for j, value in zip(c.vertices, c.values)]
        for y in range(d)
    ]
    return VertexPartition.from_blocks(blocks, order)


def pull_back(e: GspExtension, base: LetterMaps, chi: Mapping[str, str]) -> GspExtension:
    """
    The trivial extension a(i, j) = a1(i, chi(j)) over a base mapping onto e's base.

    Raises:
        ExtensionError: If chi does not intertwine the letter maps
    """
    check_base_map(base, e.base, chi)
    cocycle = {
        (letter, j): e.a(letter, chi[j]) for letter in base.letters for j in base.vertices
    }
    return build_gsp(base, e.rho, cocycle, e.d)


def check_base_map(source: LetterMaps, target: LetterMaps, kappa: Mapping[str, str]) -> None:
    """Raise unless kappa(f_i j) = f_i kappa(j) for every letter and vertex."""
    for letter in source.letters:
        for j in source.vertices:
            if kappa[source.image(letter, j)] != target.image(letter, kappa[j]):
                raise ExtensionError(
                    f"Base map does not intertwine letter {letter!r} at {j!r}"
                )


def base_hom(
    source: GspExtension, target: GspExtension, kappa: Mapping[str, str]
) -> GraphHom:
    """kappa: H -> H' on base graphs, (i, j) -> (i, kappa j)."""
    edge_map = {
        base_edge(letter, j): base_edge(letter, kappa[j])
        for letter in source.base.letters
        for j in source.vertices
    }
    return check_hom(edge_map, source.base_graph, target.base_graph)


def total_hom(
    source: GspExtension,
    target: GspExtension,
    kappa: Mapping[str, str],
    fiber_maps: Optional[Mapping[str, Permutation]] = None,
) -> GraphHom:
    """kappa-bar: H-bar -> H-bar', (i, j, y) -> (i, kappa j, w(j) y)."""
    edge_map = {}
    for letter in source.base.letters:
        for j in source.vertices:
            w = fiber_maps[j] if fiber_maps is not None else Permutation.identity(source.d)
            for y in range(source.d):
                edge_map[fiber_vertex(base_edge(letter, j), y)] = fiber_vertex(
                    base_edge(letter, kappa[j]), w(y)
                )
    return check_hom(edge_map, source.materialize(), target.materialize())


def gsp_from_labeled_graph(
    h: StochasticGraph, rho: Rho, labels: Mapping[str, str], cocycle: Cocycle, d: int
) -> GspExtension:
    """A GspExtension whose base automaton is read off a labeled base graph."""
    lm = letter_maps(check_hom(labels, h, bernoulli_graph(rho)))
    return build_gsp(lm, rho, cocycle, d)


__all__ = [
    "GspExtension",
    "GspNormalization",
    "LiftResult",
    "PersistentFunction",
    "PersistentPartitionReport",
    "VertexPartition",
    "base_edge",
    "base_hom",
    "build_gsp",
    "check_base_map",
    "extended_letter_maps",
    "fiber_vertex",
    "gsp_from_labeled_graph",
    "gsp_normalize",
    "letter_graph",
    "lift_phi_bar",
    "partition_of",
    "persistent_partitions",
    "pull_back",
    "skew_product",
    "total_hom",
]
