"""
Reduction of skew-product extensions to irreducible form

A partition xi of J is reducing when it is a forward congruence of the base
automaton and every persistent partition restricts to the same transversal
partition on each block. The coarsest one, xi*, gives the irreducible
quotient pair.
"""

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from loguru import logger

from ..utils.errors import ReductionError
from ..utils.permutation import Permutation
from .extension import (
    GspExtension,
    PersistentFunction,
    PersistentPartitionReport,
    VertexPartition,
    base_hom,
    build_gsp,
    persistent_partitions,
    total_hom,
)
from .homomorphism import GraphHom, LetterMaps


@dataclass(frozen=True)
class ReductionResult:
    """xi*, the relabeling w = c used to recoordinatize, and the quotient pair."""

    xi_star: VertexPartition
    relabeling: dict[str, Permutation]
    quotient: GspExtension
    irreducible: bool
    xi_zero: VertexPartition
    persistent: PersistentPartitionReport
    recoordinatized: GspExtension


def xi_zero(
    pfs: Union[PersistentPartitionReport, Sequence[PersistentFunction]]
) -> VertexPartition:
    """
    Coarsest partition on whose blocks every c' c^-1 is constant.

    Every function is compared with the first one; the kernel is the same as
    over all ordered pairs since c' c^-1 = (c' c0^-1)(c0 c^-1).

    Raises:
        ReductionError: If the persistent search was truncated or is empty
    """
    if isinstance(pfs, PersistentPartitionReport):
        if not pfs.exhausted:
            raise ReductionError("Persistent partitions are incomplete (budget truncated)")
        functions = pfs.functions
    else:
        functions = tuple(pfs)
    if not functions:
        raise ReductionError("No persistent functions given")
    reference = functions[0]
    vertices = reference.vertices
    signature = {
        j: tuple(
            (c.values[k] * reference.values[k].inverse()).images for c in functions[1:]
        )
        for k, j in enumerate(vertices)
    }
    return VertexPartition.kernel(vertices, signature)


def coarsest_congruence(seed: VertexPartition, base: LetterMaps) -> VertexPartition:
    """
    Coarsest refinement of `seed` that is a forward congruence (Moore refinement).

    Blocks are split by the tuple (own block, block of f_i j for every i)
    until nothing changes.
    """
    current = seed
    while True:
        index = current.block_index
        signature = {
            j: (index[j],)
            + tuple(index[base.vertices[row[u]]] for row in base.table)
            for u, j in enumerate(base.vertices)
        }
        refined = VertexPartition.kernel(base.vertices, signature)
        if len(refined) == len(current):
            return refined
        current = refined


def is_forward_congruence(xi: VertexPartition, base: LetterMaps) -> bool:
    index = xi.block_index
    for row in base.table:
        for block in xi.blocks:
            images = {index[base.vertices[row[base.vertex_index(j)]]] for j in block}
            if len(images) > 1:
                return False
    return True


def recoordinatize(
    e: GspExtension, c: PersistentFunction, xi: VertexPartition
) -> tuple[dict[str, Permutation], GspExtension]:
    """
    Conjugate the cocycle by w = c: a'(i, j) = w(f_i j) a(i, j) w(j)^-1.

    Raises:
        ReductionError: If a'(i, .) is not constant on some block of xi
    """
    w = dict(zip(c.vertices, c.values))
    cocycle = {}
    for letter, j, perm in e.cocycle_items():
        cocycle[(letter, j)] = w[e.base.image(letter, j)] * perm * w[j].inverse()
    for letter in e.base.letters:
        for block in xi.blocks:
            values = {cocycle[(letter, j)] for j in block}
            if len(values) > 1:
                raise ReductionError(
                    f"Recoordinatized cocycle is not constant on block {list(block)} "
                    f"for letter {letter!r}; the partition is not reducing"
                )
    return w, build_gsp(e.base, e.rho, cocycle, e.d, check_base=False)


def quotient(e: GspExtension, xi: VertexPartition) -> GspExtension:
    """
    The quotient pair over J / xi; each block is named by its first vertex.

    Raises:
        ReductionError: If xi is not a congruence or the cocycle is not block-constant
    """
    if not is_forward_congruence(xi, e.base):
        raise ReductionError("Partition is not a forward congruence of the base")
    representative = {j: block[0] for block in xi.blocks for j in block}
    vertices = tuple(block[0] for block in xi.blocks)
    maps = {
        letter: {
            block[0]: representative[e.base.image(letter, block[0])] for block in xi.blocks
        }
        for letter in e.base.letters
    }
    cocycle = {}
    for letter, j, perm in e.cocycle_items():
        key = (letter, representative[j])
        if cocycle.setdefault(key, perm) != perm:
            raise ReductionError(f"Cocycle is not constant on the block of {j!r}")
    base = LetterMaps.from_functions(e.base.letters, vertices, maps)
    return build_gsp(base, e.rho, cocycle, e.d)


def reduce_to_irreducible(
    e: GspExtension,
    budget: int = 2**20,
    persistent: Optional[PersistentPartitionReport] = None,
) -> ReductionResult:
    """
    Compute xi*, recoordinatize with the first persistent function and take the quotient.

    `irreducible` reports whether the input pair was already irreducible,
    that is whether xi* is the partition into points.

    Args:
        e: The pair to reduce
        budget: Persistent-partition budget
        persistent: A persistent-partition report for e computed earlier

    Raises:
        ReductionError: If the persistent partition search was truncated
    """
    report = persistent if persistent is not None else persistent_partitions(e, budget)
    seed = xi_zero(report)
    xi_star = coarsest_congruence(seed, e.base)
    w, recoordinatized = recoordinatize(e, report.functions[0], xi_star)
    reduced = quotient(recoordinatized, xi_star)
    irreducible = xi_star.is_discrete()
    logger.info(
        f"Reduction: |J| = {len(e.vertices)} -> {len(reduced.vertices)}, "
        f"{len(report.functions)} persistent partitions, irreducible={irreducible}"
    )
    return ReductionResult(xi_star, w, reduced, irreducible, seed, report, recoordinatized)


def majorizing_homs(e: GspExtension, result: ReductionResult) -> tuple[GraphHom, GraphHom]:
    """
    kappa: H -> H* and kappa-bar: H-bar -> H-bar*, both validated.

    kappa-bar(i, j, y) = (i, [j], w(j) y) absorbs the recoordinatization.
    """
    representative: Mapping[str, str] = {
        j: block[0] for block in result.xi_star.blocks for j in block
    }
    kappa = base_hom(e, result.quotient, representative)
    kappa_bar = total_hom(e, result.quotient, representative, result.relabeling)
    return kappa, kappa_bar


__all__ = [
    "ReductionResult",
    "coarsest_congruence",
    "is_forward_congruence",
    "majorizing_homs",
    "quotient",
    "recoordinatize",
    "reduce_to_irreducible",
    "xi_zero",
]
