"""
Tests for skew-product extensions, lifts and persistent partitions
"""

from itertools import product

import pytest

from markovcanon.core.catalog import (
    bernoulli_extension,
    drunkard_maps,
    drunkard_rho,
    drunkard_z2_extension,
)
from markovcanon.core.classify import extensions_equivalent
from markovcanon.core.contraction import degree
from markovcanon.core.extension import (
    GspExtension,
    VertexPartition,
    build_gsp,
    extended_letter_maps,
    fiber_vertex,
    gsp_normalize,
    lift_phi_bar,
    partition_of,
    persistent_partitions,
    pull_back,
    total_hom,
)
from markovcanon.core.graph import is_irreducible
from markovcanon.core.homomorphism import LetterMaps, apply_word, coloring_from_labels
from markovcanon.utils.errors import ContractionError, ExtensionError
from markovcanon.utils.permutation import Permutation

SWAP = Permutation.transposition(2, 0, 1)
ID2 = Permutation.identity(2)


def sync_word_functions(e: GspExtension, max_len: int) -> set[tuple[Permutation, ...]]:
    """
    Brute force: normalized fiber functions c_w of every synchronizing word.

    c_w(j) is the product of the cocycle along the path of w from j,
    rightmost letter first.
    """
    found = set()
    for length in range(1, max_len + 1):
        for word in product(e.base.letters, repeat=length):
            if len({apply_word(e.base, word, j) for j in e.vertices}) != 1:
                continue
            values = []
            for j in e.vertices:
                value = Permutation.identity(e.d)
                here = j
                for letter in reversed(word):
                    value = e.a(letter, here) * value
                    here = e.base.image(letter, here)
                values.append(value)
            shift = values[0].inverse()
            found.add(tuple(shift * value for value in values))
    return found


Partition = frozenset[frozenset[str]]


def transversal_partitions(e: GspExtension) -> set[Partition]:
    """Every partition of J x Y_d whose classes meet each fiber exactly once."""
    perms = list(Permutation.all(e.d))
    return {
        frozenset(
            frozenset(fiber_vertex(j, perm(y)) for j, perm in zip(e.vertices, choice))
            for y in range(e.d)
        )
        for choice in product(perms, repeat=len(e.vertices))
    }


def pulled_back(e: GspExtension, word: tuple[str, ...], partition: Partition) -> Partition:
    """The partition of J x Y_d induced by f-bar_w and `partition`."""
    class_of = {v: block for block in partition for v in block}
    groups: dict[frozenset[str], set[str]] = {}
    for j in e.vertices:
        for y in range(e.d):
            here, z = j, y
            for letter in reversed(word):
                here, z = e.base.image(letter, here), e.a(letter, here)(z)
            groups.setdefault(class_of[fiber_vertex(here, z)], set()).add(fiber_vertex(j, y))
    return frozenset(frozenset(group) for group in groups.values())


def persistent_by_pull_back(e: GspExtension, max_len: int) -> set[Partition]:
    """
    Brute force: transversal partitions r such that every transversal r1
    pulls back to r along some word of length at most max_len.
    """
    transversal = transversal_partitions(e)
    reachable: dict[Partition, set[Partition]] = {r1: set() for r1 in transversal}
    for length in range(max_len + 1):
        for word in product(e.base.letters, repeat=length):
            for r1 in transversal:
                reachable[r1].add(pulled_back(e, word, r1))
    return set.intersection(*reachable.values())


class TestBuildGsp:
    """Test cases for assembling extensions."""

    def test_z2_total_graph(self, z2_three):
        """Test the total graph of the Drunkard's Ruin Z2 extension."""
        total = z2_three.materialize()
        assert len(total.vertices) == 6
        assert len(total.edges) == 12
        assert "1^2" in total.vertices
        assert total.edge("1:1^1").dst == "2^2"
        assert total.edge("0:1^1").dst == "1^1"
        assert z2_three.is_irreducible()

    @pytest.mark.parametrize("d", [2, 3])
    def test_bernoulli_irreducible_iff_transitive(self, d):
        """Test the one-vertex shortcut against the materialized total graph."""
        perms = list(Permutation.all(d))
        for pair in product(perms, repeat=2):
            e = bernoulli_extension(drunkard_rho(), pair)
            assert e.is_irreducible() == is_irreducible(e.materialize())

    def test_trivial_cocycle_is_reducible(self):
        """Test that the identity cocycle gives two disjoint copies."""
        base = drunkard_maps(3)
        cocycle = {(i, j): ID2 for i in base.letters for j in base.vertices}
        e = build_gsp(base, drunkard_rho(), cocycle, 2)
        assert not e.is_irreducible()

    def test_missing_cocycle_value(self):
        """Test that the cocycle must be total."""
        base = drunkard_maps(3)
        with pytest.raises(ExtensionError, match="not total"):
            build_gsp(base, drunkard_rho(), {("0", "1"): SWAP}, 2)

    def test_wrong_degree(self):
        """Test that cocycle values must act on Y_d."""
        base = drunkard_maps(2)
        cocycle = {(i, j): Permutation.identity(3) for i in base.letters for j in base.vertices}
        with pytest.raises(ExtensionError, match="degree"):
            build_gsp(base, drunkard_rho(), cocycle, 2)

    def test_base_must_synchronize(self):
        """Test that a non-synchronizing base is rejected."""
        swap = {"u": "v", "v": "u"}
        base = LetterMaps.from_functions(("0", "1"), ("u", "v"), {"0": swap, "1": swap})
        cocycle = {(i, j): ID2 for i in base.letters for j in base.vertices}
        with pytest.raises(ExtensionError, match="1-contractive"):
            build_gsp(base, drunkard_rho(), cocycle, 2)

    def test_projection_and_psi(self, z2_three):
        """Test that pi and psi are valid homomorphisms composing to the total coloring."""
        projection = z2_three.projection()
        psi = z2_three.psi()
        labels = z2_three.total_labels()
        for edge in z2_three.materialize().edges:
            assert psi(projection(edge.id)) == labels[edge.id]


class TestNormalization:
    """Test cases for rewriting d-extensions as skew products."""

    def test_normalize_projection(self, z2_three):
        """Test that normalizing pi recovers the cocycle."""
        normalization = gsp_normalize(z2_three.projection())
        assert normalization.d == 2
        assert normalization.cocycle["1:1"] == SWAP
        assert normalization.cocycle["0:1"] == ID2
        assert normalization.cocycle["1:3"] == ID2

    def test_extended_maps(self, z2_three):
        """Test f-bar on a fiber point."""
        lm = extended_letter_maps(z2_three)
        assert lm.image("0", "1^1") == "1^1"
        assert lm.image("1", "1^1") == "2^2"
        assert lm.image("1", "2^2") == "3^2"


class TestLift:
    """Test cases for the lift of a coloring."""

    def test_lift_of_z2_total_graph(self, z2_three):
        """Test the lift of the total coloring of the Z2 extension."""
        total = z2_three.materialize()
        phi = coloring_from_labels(total, z2_three.rho, z2_three.total_labels())
        lift = lift_phi_bar(total, phi)
        assert lift.extension.d == 2
        assert lift.psi_bar.target is total
        assert degree(lift.extension.base).degree == 1
        assert all(len(block) == 2 for block in lift.persistent_sets)
        assert lift.extension.vertices[0] == "L1"
        assert extensions_equivalent(lift.extension, z2_three) is not None

    def test_truncated_contraction(self, z2_three):
        """Test that a lift refuses an uncertified degree."""
        total = z2_three.materialize()
        phi = coloring_from_labels(total, z2_three.rho, z2_three.total_labels())
        with pytest.raises(ContractionError, match="truncated"):
            lift_phi_bar(total, phi, budget=1)

    def test_lift_of_degree_one_coloring(self, drunkard3):
        """Test that a synchronizing coloring lifts with d = 1."""
        lift = lift_phi_bar(drunkard3.graph, drunkard3.coloring())
        assert lift.extension.d == 1
        assert len(lift.extension.vertices) == 3


class TestPersistentPartitions:
    """Test cases for persistent transversal partitions."""

    def test_three_states(self, z2_three):
        """Test the census of persistent partitions for three states."""
        report = persistent_partitions(z2_three)
        assert report.exhausted
        values = {c.values for c in report.functions}
        assert len(values) == 3
        assert (ID2, SWAP, ID2) not in values

    @pytest.mark.parametrize("n", [3, 4])
    def test_matches_synchronizing_words(self, n):
        """Test the census against fiber functions of all synchronizing words."""
        e = drunkard_z2_extension(n)
        report = persistent_partitions(e)
        assert {c.values for c in report.functions} == sync_word_functions(e, 10)

    @pytest.mark.parametrize("n", [3, 4])
    def test_matches_pull_back_definition(self, n):
        """Test the census against pull-backs of every transversal partition."""
        e = drunkard_z2_extension(n)
        found = {
            frozenset(frozenset(block) for block in partition_of(c, e.d).blocks)
            for c in persistent_partitions(e).functions
        }
        assert found == persistent_by_pull_back(e, 10)

    def test_four_states(self, z2_four):
        """Test the census for four states."""
        values = {c.values for c in persistent_partitions(z2_four).functions}
        assert len(values) == 6
        assert (ID2, SWAP, ID2, SWAP) not in values
        assert (ID2, SWAP, SWAP, ID2) not in values

    def test_functions_are_normalized(self, z2_four):
        """Test that c(j0) is the identity for every function."""
        for c in persistent_partitions(z2_four).functions:
            assert c.values[0].is_identity()

    def test_partition_blocks_are_transversal(self, z2_three):
        """Test that each class meets every fiber once."""
        for c in persistent_partitions(z2_three).functions:
            partition = partition_of(c, 2)
            assert len(partition) == 2
            for block in partition.blocks:
                assert sorted(v.split("^")[0] for v in block) == ["1", "2", "3"]

    def test_budget(self, z2_four):
        """Test that the search reports truncation."""
        report = persistent_partitions(z2_four, budget=1)
        assert not report.exhausted


class TestVertexPartition:
    """Test cases for partitions of a vertex set."""

    def test_canonical_order(self):
        """Test that blocks are ordered by their first vertex."""
        partition = VertexPartition.from_blocks([["c", "a"], ["b"]], ["a", "b", "c"])
        assert partition.blocks == (("a", "c"), ("b",))
        assert partition.block_of("c") == ("a", "c")

    def test_not_a_cover(self):
        """Test that blocks must cover the vertex set exactly."""
        with pytest.raises(ExtensionError):
            VertexPartition.from_blocks([["a"]], ["a", "b"])

    def test_refines(self):
        """Test the refinement order."""
        order = ["a", "b", "c"]
        assert VertexPartition.singletons(order).refines(VertexPartition.whole(order))
        assert not VertexPartition.whole(order).refines(VertexPartition.singletons(order))
        assert VertexPartition.singletons(order).is_discrete()


class TestBaseMaps:
    """Test cases for pull-backs and total homomorphisms."""

    def test_pull_back_along_identity(self, z2_three):
        """Test that pulling back along the identity changes nothing."""
        chi = {j: j for j in z2_three.vertices}
        assert pull_back(z2_three, z2_three.base, chi) == z2_three

    def test_pull_back_requires_intertwining(self, z2_three):
        """Test that chi must commute with the letter maps."""
        chi = {"1": "2", "2": "2", "3": "2"}
        with pytest.raises(ExtensionError, match="intertwine"):
            pull_back(z2_three, z2_three.base, chi)

    def test_total_hom_with_fiber_swap(self, z2_three):
        """Test that swapping every fiber is an automorphism of the Z2 total graph."""
        kappa = {j: j for j in z2_three.vertices}
        hom = total_hom(z2_three, z2_three, kappa, {j: SWAP for j in z2_three.vertices})
        assert hom("1:2^1") == "1:2^2"
