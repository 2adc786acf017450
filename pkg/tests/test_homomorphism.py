"""
Tests for graph homomorphisms, letter maps and coloring enumeration
"""

from fractions import Fraction

import pytest

from markovcanon.core.contraction import degree
from markovcanon.core.graph import bernoulli_graph, stationary_distribution, stringing
from markovcanon.core.homomorphism import (
    ColoringEnumeration,
    LetterMaps,
    apply_word,
    check_hom,
    edge_fiber_sizes,
    factor_prefix,
    format_word,
    identity_hom,
    letter_maps,
    pushforward,
    stringing_projection,
)
from markovcanon.utils.errors import HomomorphismError


class TestCheckHom:
    """Test cases for homomorphism validation."""

    def test_drunkard_coloring(self, drunkard3):
        """Test that the letter labels form a coloring."""
        phi = drunkard3.coloring()
        assert phi.vertex_map == {"1": "o", "2": "o", "3": "o"}
        assert edge_fiber_sizes(phi) == {"0": 3, "1": 3}

    def test_weight_mismatch(self, drunkard3):
        """Test that an edge map changing weights is rejected."""
        labels = dict(drunkard3.labels)
        labels["0:1"], labels["1:1"] = "1", "0"
        with pytest.raises(HomomorphismError, match="Weight mismatch"):
            check_hom(labels, drunkard3.graph, bernoulli_graph(drunkard3.rho))

    def test_partial_map(self, drunkard3):
        """Test that partial edge maps are rejected."""
        labels = dict(drunkard3.labels)
        del labels["1:3"]
        with pytest.raises(HomomorphismError, match="not total"):
            check_hom(labels, drunkard3.graph, bernoulli_graph(drunkard3.rho))

    def test_not_a_bijection_on_out_edges(self, homogeneous, cycle):
        """Test that two out-edges of a vertex cannot share an image."""
        labels = dict(cycle.labels)
        labels["a1"] = "0"
        with pytest.raises(HomomorphismError, match="bijection"):
            check_hom(labels, cycle.graph, bernoulli_graph(homogeneous))

    def test_identity(self, drunkard3):
        """Test the identity homomorphism."""
        hom = identity_hom(drunkard3.graph)
        assert hom("0:2") == "0:2"

    def test_pushforward_is_rho(self, drunkard3):
        """Test that a coloring pushes the Markov measure onto rho."""
        phi = drunkard3.coloring()
        mass = pushforward(phi, stationary_distribution(drunkard3.graph))
        assert mass == {"0": Fraction(2, 3), "1": Fraction(1, 3)}

    def test_factor_prefix(self, drunkard3):
        """Test the letter image of a path."""
        phi = drunkard3.coloring()
        assert factor_prefix(phi, ("0:2", "1:1")) == ("0", "1")


class TestStringingProjection:
    """Test cases for pi^(n) and composition."""

    def test_projection_has_degree_one(self, drunkard3):
        """Test that the coloring pulled back to G^(2) keeps degree 1."""
        projection = stringing_projection(drunkard3.graph, 2)
        pulled = drunkard3.coloring().compose(projection)
        assert pulled.source.vertices == stringing(drunkard3.graph, 2).vertices
        assert degree(letter_maps(pulled)).degree == 1

    def test_projection_maps_path_to_last_edge(self, drunkard3):
        """Test that the n-path g1 g2 goes to g1."""
        projection = stringing_projection(drunkard3.graph, 2)
        assert projection("0:2.1:1") == "0:2"

    def test_compose_mismatch(self, drunkard3, drunkard4):
        """Test that composition checks the intermediate graph."""
        with pytest.raises(HomomorphismError, match="Cannot compose"):
            drunkard3.coloring().compose(identity_hom(drunkard4.graph))


class TestLetterMaps:
    """Test cases for the letter maps f_i."""

    def test_drunkard_letter_maps(self, drunkard3):
        """Test f_0 and f_1 of the Drunkard's Ruin."""
        lm = letter_maps(drunkard3.coloring())
        assert lm.as_functions() == {
            "0": {"1": "1", "2": "1", "3": "2"},
            "1": {"1": "2", "2": "3", "3": "3"},
        }
        assert lm.edge_of("1", "2") == "1:2"

    def test_words_apply_rightmost_first(self, drunkard3):
        """Test that f_01 = f_0 o f_1."""
        lm = letter_maps(drunkard3.coloring())
        assert apply_word(lm, ("0", "1"), "3") == "2"
        assert apply_word(lm, ("1", "0"), "1") == "2"

    def test_from_functions_must_be_total(self):
        """Test that missing images are rejected."""
        with pytest.raises(HomomorphismError):
            LetterMaps.from_functions(("a",), ("u", "v"), {"a": {"u": "v"}})

    def test_format_word(self):
        """Test word rendering."""
        assert format_word(("0", "1", "1")) == "011"
        assert format_word(("up", "down")) == "up down"
        assert format_word(()) == ""


class TestColoringEnumeration:
    """Test cases for the enumeration of all colorings."""

    def test_unique_coloring_for_distinct_weights(self, drunkard3):
        """Test that distinct weights leave exactly one coloring."""
        colorings = list(ColoringEnumeration(drunkard3.graph, drunkard3.rho))
        assert len(colorings) == 1
        assert colorings[0].edge_map == drunkard3.labels

    def test_homogeneous_count(self, cycle):
        """Test the 2 x 2 colorings of the homogeneous 2-cycle."""
        enumeration = ColoringEnumeration(cycle.graph, cycle.rho)
        assert enumeration.total == 4
        assert len({tuple(sorted(phi.edge_map.items())) for phi in enumeration}) == 4
        assert not enumeration.truncated

    def test_budget_truncates(self, cycle):
        """Test that a budget cuts the stream and sets the flag."""
        enumeration = ColoringEnumeration(cycle.graph, cycle.rho, budget=3)
        assert len(list(enumeration)) == 3
        assert enumeration.truncated

    def test_not_rho_uniform(self, drunkard3, homogeneous):
        """Test that a graph that is not rho-uniform has no coloring."""
        with pytest.raises(HomomorphismError, match="rho-uniform"):
            ColoringEnumeration(drunkard3.graph, homogeneous)
