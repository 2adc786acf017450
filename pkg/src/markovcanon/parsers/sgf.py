"""
SGF, the stochastic graph format

Line oriented UTF-8 text; `#` starts a comment. Keys:

    graph <name>
    rho <letter> <rational>
    vertex <id>
    edge <id> <src> <dst> <rational> [label=<letter>]
    color <edge-id> <letter>
    fiber <d>
    cocycle <letter> <vertex> <permutation>
    cocycle <edge-id> <permutation>
    xi-block <vertex> ...
    relabel <vertex> <permutation>
    irreducible=<true|false>

Sections are emitted in this order. A skew-product pair is stored as its
base graph H (edges labeled by letters) plus `fiber` and one `cocycle`
line per (letter, vertex); permutations use bracketed one-line notation.
A `color` line is the same as a `label=` attribute, and a cocycle value
may also be keyed by the id of its base edge.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Union

from loguru import logger

from ..core.extension import GspExtension, gsp_from_labeled_graph
from ..core.graph import Edge, Rho, StochasticGraph
from ..core.homomorphism import GraphHom, coloring_from_labels
from ..core.reduction import ReductionResult
from ..utils.errors import GraphValidationError, SgfParseError
from ..utils.permutation import Permutation
from ..utils.rationals import format_rational, parse_rational


@dataclass
class SgfDocument:
    """Everything one SGF file can hold."""

    graph: StochasticGraph
    rho: Optional[Rho] = None
    labels: Optional[dict[str, str]] = None
    d: Optional[int] = None
    cocycle: dict[str, Permutation] = field(default_factory=dict)
    xi_blocks: list[tuple[str, ...]] = field(default_factory=list)
    relabel: dict[str, Permutation] = field(default_factory=dict)
    irreducible: Optional[bool] = None

    @property
    def name(self) -> Optional[str]:
        return self.graph.name

    def coloring(self) -> GraphHom:
        """
        The coloring given by `label=` attributes or `color` lines.

        Raises:
            SgfParseError: If the file has no rho or no labels
        """
        if self.rho is None or self.labels is None:
            raise SgfParseError("A coloring needs rho lines and edge labels")
        return coloring_from_labels(self.graph, self.rho, self.labels)

    def extension(self) -> GspExtension:
        """
        The skew-product pair stored in the file.

        Raises:
            SgfParseError: If rho, labels, fiber or cocycle lines are missing
        """
        if self.rho is None or self.labels is None or self.d is None:
            raise SgfParseError("A skew-product file needs rho, labels and a fiber line")
        missing = [edge.id for edge in self.graph.edges if edge.id not in self.cocycle]
        if missing:
            raise SgfParseError(f"No cocycle value for base edges {missing[:5]}")
        cocycle = {
            (self.labels[edge.id], edge.src): self.cocycle[edge.id] for edge in self.graph.edges
        }
        return gsp_from_labeled_graph(self.graph, self.rho, self.labels, cocycle, self.d)


def _rational(token: str, line: int) -> Fraction:
    try:
        return parse_rational(token)
    except ValueError as e:
        raise SgfParseError(str(e), line)


def _permutation(text: str, line: int) -> Permutation:
    try:
        return Permutation.parse(text)
    except ValueError as e:
        raise SgfParseError(str(e), line)


def _arity(tokens: list[str], expected: int, line: int) -> None:
    if len(tokens) != expected:
        raise SgfParseError(
            f"'{tokens[0]}' takes {expected - 1} argument(s), got {len(tokens) - 1}", line
        )


def parse_sgf(text: Union[str, bytes]) -> SgfDocument:
    """
    Parse and validate SGF text.

    Args:
        text: The file contents (bytes are decoded as UTF-8)

    Returns:
        SgfDocument with a validated graph

    Raises:
        SgfParseError: On syntax errors, duplicate ids, bad literals or a
            row-sum violation, with the offending line number
        GraphValidationError: If the graph breaks another structural invariant
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SgfParseError(f"Input is not UTF-8: {e}")

    name: Optional[str] = None
    rho_pairs: list[tuple[str, Fraction]] = []
    rho_lines: dict[str, int] = {}
    vertices: list[str] = []
    vertex_lines: dict[str, int] = {}
    edges: list[Edge] = []
    edge_lines: dict[str, int] = {}
    labels: dict[str, str] = {}
    label_lines: dict[str, int] = {}
    colors: dict[str, tuple[str, int]] = {}
    d: Optional[int] = None
    cocycle: dict[str, Permutation] = {}
    cocycle_lines: dict[str, int] = {}
    vertex_cocycle: dict[tuple[str, str], tuple[Permutation, int]] = {}
    xi_blocks: list[tuple[str, ...]] = []
    relabel: dict[str, Permutation] = {}
    irreducible: Optional[bool] = None

    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        key = tokens[0]

        if key == "graph":
            _arity(tokens, 2, number)
            if name is not None:
                raise SgfParseError("Duplicate 'graph' header", number)
            name = tokens[1]
        elif key == "rho":
            _arity(tokens, 3, number)
            letter = tokens[1]
            if letter in rho_lines:
                raise SgfParseError(f"Duplicate rho letter {letter!r}", number)
            rho_lines[letter] = number
            rho_pairs.append((letter, _rational(tokens[2], number)))
        elif key == "vertex":
            _arity(tokens, 2, number)
            vertex = tokens[1]
            if vertex in vertex_lines:
                raise SgfParseError(f"Duplicate vertex id {vertex!r}", number)
            vertex_lines[vertex] = number
            vertices.append(vertex)
        elif key == "edge":
            if len(tokens) not in (5, 6):
                raise SgfParseError(
                    "'edge' takes <id> <src> <dst> <weight> [label=<letter>]", number
                )
            edge_id, src, dst = tokens[1:4]
            if edge_id in edge_lines:
                raise SgfParseError(f"Duplicate edge id {edge_id!r}", number)
            edge_lines[edge_id] = number
            weight = _rational(tokens[4], number)
            if weight <= 0:
                raise SgfParseError(f"Edge {edge_id!r} has non-positive weight {tokens[4]}", number)
            if len(tokens) == 6:
                attribute, _, value = tokens[5].partition("=")
                if attribute != "label" or not value:
                    raise SgfParseError(f"Unknown edge attribute {tokens[5]!r}", number)
                labels[edge_id] = value
                label_lines[edge_id] = number
            edges.append(Edge(edge_id, src, dst, weight))
        elif key == "color":
            _arity(tokens, 3, number)
            edge_id = tokens[1]
            if edge_id in colors:
                raise SgfParseError(f"Duplicate color for edge {edge_id!r}", number)
            colors[edge_id] = (tokens[2], number)
        elif key == "fiber":
            _arity(tokens, 2, number)
            if not tokens[1].isdigit() or int(tokens[1]) < 1:
                raise SgfParseError(f"Fiber size must be a positive integer, got {tokens[1]!r}", number)
            d = int(tokens[1])
        elif key == "cocycle":
            if len(tokens) >= 4 and not tokens[2].startswith("["):
                pair = (tokens[1], tokens[2])
                if pair in vertex_cocycle:
                    raise SgfParseError(f"Duplicate cocycle value for {pair}", number)
                vertex_cocycle[pair] = (_permutation(" ".join(tokens[3:]), number), number)
                continue
            if len(tokens) < 3:
                raise SgfParseError(
                    "'cocycle' takes <letter> <vertex> <permutation> or <edge-id> <permutation>",
                    number,
                )
            if tokens[1] in cocycle:
                raise SgfParseError(f"Duplicate cocycle value for {tokens[1]!r}", number)
            cocycle[tokens[1]] = _permutation(" ".join(tokens[2:]), number)
            cocycle_lines[tokens[1]] = number
        elif key == "xi-block":
            if len(tokens) < 2:
                raise SgfParseError("'xi-block' needs at least one vertex", number)
            xi_blocks.append(tuple(tokens[1:]))
        elif key == "relabel":
            if len(tokens) < 3:
                raise SgfParseError("'relabel' takes <vertex> <permutation>", number)
            relabel[tokens[1]] = _permutation(" ".join(tokens[2:]), number)
        elif key.startswith("irreducible="):
            _arity(tokens, 1, number)
            value = key.partition("=")[2]
            if value not in ("true", "false"):
                raise SgfParseError(f"irreducible must be true or false, got {value!r}", number)
            irreducible = value == "true"
        else:
            raise SgfParseError(f"Unknown key {key!r}", number)

    for edge in edges:
        for end in (edge.src, edge.dst):
            if end not in vertex_lines:
                raise SgfParseError(
                    f"Edge {edge.id!r} uses undeclared vertex {end!r}", edge_lines[edge.id]
                )
    sums = {v: Fraction(0) for v in vertices}
    for edge in edges:
        sums[edge.src] += edge.weight
    for vertex, total in sums.items():
        if total != 1:
            raise SgfParseError(
                f"Out-weights of vertex {vertex!r} sum to {format_rational(total)}, not 1",
                vertex_lines[vertex],
            )

    rho = None
    if rho_pairs:
        try:
            rho = Rho.from_pairs(rho_pairs)
        except GraphValidationError as e:
            raise SgfParseError(str(e), min(rho_lines.values()))

    for edge_id, (letter, line) in colors.items():
        if edge_id not in edge_lines:
            raise SgfParseError(f"Color names unknown edge {edge_id!r}", line)
        if labels.get(edge_id, letter) != letter:
            raise SgfParseError(
                f"Color {letter!r} of {edge_id!r} contradicts label {labels[edge_id]!r}", line
            )
        labels[edge_id] = letter
        label_lines[edge_id] = line

    if labels and len(labels) != len(edges):
        unlabeled = next(edge.id for edge in edges if edge.id not in labels)
        raise SgfParseError(f"Edge {unlabeled!r} has no label", edge_lines[unlabeled])
    if labels and rho is not None:
        for edge_id, letter in labels.items():
            if letter not in rho.letters:
                raise SgfParseError(f"Label {letter!r} is not a rho letter", label_lines[edge_id])

    for (letter, vertex), (perm, line) in vertex_cocycle.items():
        if not labels:
            raise SgfParseError("Cocycle values keyed by letter need edge labels", line)
        edge_id = next(
            (edge.id for edge in edges if edge.src == vertex and labels[edge.id] == letter), None
        )
        if edge_id is None:
            raise SgfParseError(f"No edge labeled {letter!r} leaves vertex {vertex!r}", line)
        if edge_id in cocycle:
            raise SgfParseError(f"Duplicate cocycle value for {edge_id!r}", line)
        cocycle[edge_id] = perm
        cocycle_lines[edge_id] = line
    for edge_id, line in cocycle_lines.items():
        if edge_id not in edge_lines:
            raise SgfParseError(f"Cocycle names unknown edge {edge_id!r}", line)
        if d is not None and cocycle[edge_id].degree != d:
            raise SgfParseError(
                f"Cocycle value of {edge_id!r} has degree {cocycle[edge_id].degree}, expected {d}",
                line,
            )

    graph = StochasticGraph(tuple(vertices), tuple(edges), name=name)
    logger.debug(f"Parsed SGF graph {name or ''}: {len(vertices)} vertices, {len(edges)} edges")
    return SgfDocument(
        graph,
        rho,
        labels or None,
        d,
        cocycle,
        xi_blocks,
        relabel,
        irreducible,
    )


def emit_sgf(
    g: StochasticGraph,
    rho: Optional[Rho] = None,
    labels: Optional[Mapping[str, str]] = None,
    name: Optional[str] = None,
) -> str:
    """Write a graph (and optionally rho and edge labels) as SGF text."""
    lines = []
    header = name or g.name
    if header:
        lines.append(f"graph {header}")
    if rho is not None:
        lines.extend(
            f"rho {letter} {format_rational(weight)}"
            for letter, weight in zip(rho.letters, rho.weights)
        )
    lines.extend(f"vertex {v}" for v in g.vertices)
    for edge in g.edges:
        line = f"edge {edge.id} {edge.src} {edge.dst} {format_rational(edge.weight)}"
        if labels is not None:
            line += f" label={labels[edge.id]}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def emit_coloring(phi: GraphHom, rho: Rho, name: Optional[str] = None) -> str:
    """A coloring as its source graph followed by one `color` line per edge."""
    text = emit_sgf(phi.source, rho, name=name)
    return text + "".join(f"color {edge.id} {phi(edge.id)}\n" for edge in phi.source.edges)


def emit_gsp(e: GspExtension, name: Optional[str] = None) -> str:
    """A skew-product pair as its labeled base graph plus fiber and cocycle lines."""
    text = emit_sgf(e.base_graph, e.rho, e.base_labels(), name)
    lines = [f"fiber {e.d}"]
    lines.extend(f"cocycle {letter} {j} {perm}" for letter, j, perm in e.cocycle_items())
    return text + "\n".join(lines) + "\n"


def parse_gsp(text: Union[str, bytes]) -> GspExtension:
    return parse_sgf(text).extension()


def emit_reduction(result: ReductionResult, name: Optional[str] = None) -> str:
    """The quotient pair followed by xi* blocks, the relabeling and the irreducibility flag."""
    lines = [emit_gsp(result.quotient, name).rstrip("\n")]
    lines.extend("xi-block " + " ".join(block) for block in result.xi_star.blocks)
    lines.extend(f"relabel {j} {perm}" for j, perm in result.relabeling.items())
    lines.append(f"irreducible={'true' if result.irreducible else 'false'}")
    return "\n".join(lines) + "\n"


__all__ = [
    "SgfDocument",
    "emit_coloring",
    "emit_gsp",
    "emit_reduction",
    "emit_sgf",
    "parse_gsp",
    "parse_sgf",
]
