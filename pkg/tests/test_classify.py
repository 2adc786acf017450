"""
Tests for minimal index, cohomology, canonical forms and isomorphism verdicts
"""

import random
from fractions import Fraction
from itertools import product

import pytest

from markovcanon.core.catalog import (
    HOMOGENEOUS,
    bernoulli_extension,
    disjoint_loops,
    drunkard_maps,
    drunkard_rho,
    drunkard_ruin,
    drunkard_z2_extension,
    random_relabeling,
    two_cycle,
)
from markovcanon.core.classify import (
    EquivalenceCertificate,
    IsoStatus,
    base_isomorphisms,
    canonical_form,
    cohomologous,
    common_extension_degree1,
    common_extension_shifts,
    extensions_equivalent,
    minimal_index,
    satisfies_modular_condition,
    shifts_isomorphic,
    verify_certificate,
)
from markovcanon.core.graph import Rho, StochasticGraph, is_irreducible, stringing
from markovcanon.core.homomorphism import LetterMaps
from markovcanon.utils.config import SearchSettings
from markovcanon.utils.errors import ClassificationError, UnsupportedError
from markovcanon.utils.permutation import Permutation, is_transitive

ID2 = Permutation.identity(2)
SWAP = Permutation.transposition(2, 0, 1)


def satisfies_equation(base: LetterMaps, a1, a2, w) -> bool:
    return all(
        a2[(i, j)] * w[j] == w[base.image(i, j)] * a1[(i, j)]
        for i in base.letters
        for j in base.vertices
    )


def brute_force_cohomologous(base: LetterMaps, a1, a2, d: int) -> bool:
    """Try every w: J -> A_d."""
    group = list(Permutation.all(d))
    for values in product(group, repeat=base.size):
        if satisfies_equation(base, a1, a2, dict(zip(base.vertices, values))):
            return True
    return False


def random_cocycle(base: LetterMaps, d: int, rng: random.Random) -> dict:
    group = list(Permutation.all(d))
    return {(i, j): rng.choice(group) for i in base.letters for j in base.vertices}


def sweep_graph(name: str) -> tuple[StochasticGraph, Rho]:
    if name == "drunkard":
        labeled = drunkard_ruin(3)
        return labeled.graph, labeled.rho
    if name == "z2":
        return drunkard_z2_extension(3).materialize(), drunkard_rho()
    if name == "two-cycle":
        labeled = two_cycle()
        return labeled.graph, labeled.rho
    return bernoulli_extension(drunkard_rho(), [SWAP, ID2]).materialize(), drunkard_rho()


SWEEP = ["drunkard", "z2", "two-cycle", "bernoulli"]


def simultaneously_conjugate(a1: list[Permutation], a2: list[Permutation], d: int) -> bool:
    """Brute force: some g with g a1(i) g^-1 = a2(i) for every letter."""
    return any(
        all(g * x * g.inverse() == y for x, y in zip(a1, a2)) for g in Permutation.all(d)
    )


def transitive_pair(rng: random.Random, d: int) -> list[Permutation]:
    group = list(Permutation.all(d))
    while True:
        pair = [rng.choice(group), rng.choice(group)]
        if is_transitive(pair, d):
            return pair


@pytest.fixture
def z2_total(z2_three):
    return z2_three.materialize()


class TestMinimalIndex:
    """Test cases for the minimal-index search."""

    def test_drunkard_degree_one(self, drunkard3):
        """Test that the Drunkard's Ruin is certified at index 1."""
        report = minimal_index(drunkard3.graph, drunkard3.rho)
        assert report.d_found == 1
        assert report.certified_minimal
        assert report.certification == "degree-one"
        assert report.achieved_at == (1, 0)

    def test_unique_coloring_certificate(self, z2_total, rho):
        """Test that distinct weights certify the only coloring's degree."""
        report = minimal_index(z2_total, rho)
        assert report.d_found == 2
        assert report.certification == "unique-coloring"
        assert len(report.search_log) == 1

    def test_homogeneous_with_identity_letter(self):
        """Test that a(0) = id, a(1) = swap admits a synchronizing coloring."""
        e = bernoulli_extension(HOMOGENEOUS, [ID2, SWAP])
        report = minimal_index(e.materialize(), HOMOGENEOUS)
        assert report.d_found == 1
        assert report.certification == "degree-one"

    def test_homogeneous_period_certificate(self):
        """Test that two swaps give d = 2 = period."""
        e = bernoulli_extension(HOMOGENEOUS, [SWAP, SWAP])
        report = minimal_index(e.materialize(), HOMOGENEOUS)
        assert report.d_found == 2
        assert report.certified_minimal
        assert report.certification == "period"

    def test_reducible_graph_rejected(self):
        """Test that reducible graphs are not classified."""
        with pytest.raises(ClassificationError):
            minimal_index(disjoint_loops(), Rho(("x",), (Fraction(1),)))

    @pytest.mark.slow
    def test_jobs_do_not_change_the_result(self):
        """Test that the parallel scan picks the same coloring."""
        e = bernoulli_extension(HOMOGENEOUS, [ID2, SWAP])
        serial = minimal_index(e.materialize(), HOMOGENEOUS, SearchSettings(jobs=1))
        parallel = minimal_index(e.materialize(), HOMOGENEOUS, SearchSettings(jobs=2))
        assert serial.achieved_at == parallel.achieved_at
        assert serial.coloring.edge_map == parallel.coloring.edge_map


class TestCohomology:
    """Test cases for the cocycle equation solver."""

    @pytest.mark.parametrize("seed", range(8))
    def test_constructed_solutions(self, seed):
        """Test cocycles conjugated by a random w are recognized."""
        rng = random.Random(seed)
        base = drunkard_maps(3)
        group = list(Permutation.all(3))
        a1 = random_cocycle(base, 3, rng)
        w = {j: rng.choice(group) for j in base.vertices}
        a2 = {
            (i, j): w[base.image(i, j)] * a1[(i, j)] * w[j].inverse()
            for i in base.letters
            for j in base.vertices
        }
        solution = cohomologous(base, a1, a2, 3)
        assert solution is not None
        assert satisfies_equation(base, a1, a2, solution)

    @pytest.mark.parametrize("seed", range(12))
    def test_agrees_with_brute_force(self, seed):
        """Test random cocycle pairs against exhaustive search."""
        rng = random.Random(100 + seed)
        base = drunkard_maps(3)
        d = 2 if seed % 2 else 3
        a1 = random_cocycle(base, d, rng)
        a2 = random_cocycle(base, d, rng)
        solution = cohomologous(base, a1, a2, d)
        assert (solution is not None) == brute_force_cohomologous(base, a1, a2, d)
        if solution is not None:
            assert satisfies_equation(base, a1, a2, solution)

    def test_fiber_size_limit(self):
        """Test that d above d_max is unsupported."""
        base = drunkard_maps(2)
        a = {(i, j): Permutation.identity(3) for i in base.letters for j in base.vertices}
        with pytest.raises(UnsupportedError, match="d_max"):
            cohomologous(base, a, a, 3, d_max=2)


class TestEquivalence:
    """Test cases for equivalence of extensions and certificates."""

    def test_bernoulli_conjugacy(self, rho):
        """Test that conjugate Bernoulli extensions are equivalent."""
        a = [Permutation.transposition(3, 0, 1), Permutation((1, 2, 0))]
        g = Permutation.transposition(3, 0, 2)
        b = [g * perm * g.inverse() for perm in a]
        e1, e2 = bernoulli_extension(rho, a), bernoulli_extension(rho, b)
        certificate = extensions_equivalent(e1, e2)
        assert certificate is not None
        assert verify_certificate(e1, e2, certificate)

    def test_non_conjugate_bernoulli(self, rho):
        """Test that a transposition is not conjugate to a 3-cycle."""
        a = [Permutation.transposition(3, 0, 1), Permutation((1, 2, 0))]
        e1 = bernoulli_extension(rho, a)
        e2 = bernoulli_extension(rho, list(reversed(a)))
        assert extensions_equivalent(e1, e2) is None

    def test_tampered_certificate(self, z2_three):
        """Test that verification rejects a wrong fiber map."""
        certificate = extensions_equivalent(z2_three, z2_three)
        assert certificate is not None
        tampered = dict(certificate.w)
        tampered["2"] = tampered["2"] * SWAP
        assert not verify_certificate(
            z2_three, z2_three, EquivalenceCertificate(certificate.kappa, tampered)
        )

    def test_base_isomorphisms(self, drunkard3):
        """Test that the Drunkard's Ruin automaton has only the identity automorphism."""
        base = drunkard_maps(3)
        assert list(base_isomorphisms(base, base)) == [{"1": "1", "2": "2", "3": "3"}]

    def test_modular_condition(self, rho):
        """Test rho(i) = rho(i') implies a(i) = a(i')."""
        assert not satisfies_modular_condition(HOMOGENEOUS, {"0": ID2, "1": SWAP})
        assert satisfies_modular_condition(HOMOGENEOUS, {"0": SWAP, "1": SWAP})
        assert satisfies_modular_condition(rho, {"0": ID2, "1": SWAP})


class TestCanonicalForm:
    """Test cases for canonical forms."""

    def test_degree_one_is_bernoulli(self, drunkard3):
        """Test that a degree-1 shift reduces to the one-vertex Bernoulli pair."""
        form = canonical_form(drunkard3.graph, drunkard3.rho)
        assert form.d == 1
        assert form.certified
        assert len(form.extension.vertices) == 1
        assert [name for name, _ in form.provenance] == ["pi^(n)", "psi-bar", "kappa", "kappa-bar"]

    def test_z2_canonical_form(self, z2_total, rho):
        """Test the canonical form of the Z2 extension's total graph."""
        form = canonical_form(z2_total, rho)
        assert form.d == 2
        assert form.certified
        assert not form.caveats
        assert is_irreducible(form.extension.materialize())

    @pytest.mark.slow
    def test_idempotent(self, z2_total, rho):
        """Test that the canonical form of a canonical total graph is equivalent to it."""
        form = canonical_form(z2_total, rho)
        again = canonical_form(form.extension.materialize(), rho)
        assert again.d == form.d
        assert extensions_equivalent(form.extension, again.extension) is not None

    def test_coordinates_cover_the_lift(self, z2_total, rho):
        """Test that every lifted base vertex has a representative and a relabeling."""
        form = canonical_form(z2_total, rho)
        representative, relabeling = form.coordinates()
        assert set(representative) == set(form.lift.extension.vertices)
        assert set(relabeling) == set(form.lift.extension.vertices)
        assert set(representative.values()) == set(form.extension.vertices)

    def test_truncated_contraction(self, z2_total, rho):
        """Test that an uncertified degree is refused."""
        with pytest.raises(ClassificationError, match="subset_budget"):
            canonical_form(z2_total, rho, SearchSettings(subset_budget=1))


class TestShiftsIsomorphic:
    """Test cases for the three-valued verdict."""

    def test_relabeled_drunkard(self, drunkard3):
        """Test that a relabeled copy is isomorphic with a valid certificate."""
        copy = random_relabeling(drunkard3.graph, seed=3).graph
        verdict = shifts_isomorphic(drunkard3.graph, copy, drunkard3.rho)
        assert verdict.status is IsoStatus.ISO_YES
        assert verdict.reason == "equivalent-canonical-forms"
        assert verify_certificate(
            verdict.canon1.extension, verdict.canon2.extension, verdict.certificate
        )

    def test_relabeled_z2(self, z2_total, rho):
        """Test a relabeled copy of a degree-2 shift."""
        copy = random_relabeling(z2_total, seed=5).graph
        verdict = shifts_isomorphic(z2_total, copy, rho)
        assert verdict.status is IsoStatus.ISO_YES
        assert verdict.degrees == (2, 2)
        assert verdict.certified

    def test_stringing_is_isomorphic(self, drunkard3):
        """Test that G and its 2-stringing define the same shift."""
        verdict = shifts_isomorphic(
            drunkard3.graph, stringing(drunkard3.graph, 2), drunkard3.rho
        )
        assert verdict.status is IsoStatus.ISO_YES

    def test_z2_three_and_four_differ(self, z2_three, z2_four, rho):
        """Test that the Z2 extensions over three and four states are not isomorphic."""
        verdict = shifts_isomorphic(z2_three.materialize(), z2_four.materialize(), rho)
        assert verdict.status is IsoStatus.ISO_NO
        assert verdict.certified

    def test_period_mismatch(self, cycle):
        """Test that different periods decide NO before any search."""
        loop = bernoulli_extension(HOMOGENEOUS, [ID2, SWAP]).materialize()
        verdict = shifts_isomorphic(cycle.graph, loop, HOMOGENEOUS)
        assert verdict.status is IsoStatus.ISO_NO
        assert verdict.reason == "period-mismatch"
        assert verdict.periods == (2, 1)

    def test_budget_gives_unknown(self, z2_total, rho):
        """Test that a truncated search yields UNKNOWN, never NO."""
        copy = random_relabeling(z2_total, seed=5).graph
        verdict = shifts_isomorphic(z2_total, copy, rho, SearchSettings(subset_budget=1))
        assert verdict.status is IsoStatus.UNKNOWN
        assert verdict.reason == "search-budget"


class TestCommonExtension:
    """Test cases for degree-1 common extensions."""

    def test_pair_base(self, rho):
        """Test the synchronized pair automaton of two copies of one base."""
        base = drunkard_maps(3)
        common = common_extension_degree1(base, base, rho)
        assert common.base.vertices == ("1&1", "2&2", "3&3")
        assert common.chi1 == {"1&1": "1", "2&2": "2", "3&3": "3"}

    def test_common_extension_of_relabeled_z2(self, z2_total, rho):
        """Test that both maps out of the common extension are homomorphisms onto the inputs."""
        copy = random_relabeling(z2_total, seed=9).graph
        common = common_extension_shifts(z2_total, copy, rho)
        assert common.phi1.target is z2_total
        assert common.phi2.target is copy
        assert common.phi1.source is common.phi2.source
        assert len(common.graph.vertices) == 2 * len(common.extension.vertices)

    def test_requires_isomorphism(self, z2_three, z2_four, rho):
        """Test that non-isomorphic inputs have no common extension."""
        with pytest.raises(ClassificationError, match="ISO_YES"):
            common_extension_shifts(z2_three.materialize(), z2_four.materialize(), rho)


class TestSweeps:
    """Test cases repeated over every catalog graph."""

    @pytest.mark.parametrize("name", SWEEP)
    def test_relabelings_are_isomorphic(self, name):
        """Test fifty relabelings, re-verifying every certificate."""
        g, rho = sweep_graph(name)
        for seed in range(50):
            copy = random_relabeling(g, seed=seed).graph
            verdict = shifts_isomorphic(g, copy, rho)
            assert verdict.status is IsoStatus.ISO_YES
            assert verify_certificate(
                verdict.canon1.extension, verdict.canon2.extension, verdict.certificate
            )

    @pytest.mark.parametrize("name", SWEEP)
    def test_stringing_is_isomorphic(self, name):
        """Test that every graph is isomorphic to its 2-stringing."""
        g, rho = sweep_graph(name)
        assert shifts_isomorphic(g, stringing(g, 2), rho).status is IsoStatus.ISO_YES

    @pytest.mark.parametrize("name", ["drunkard", "two-cycle", "bernoulli"])
    def test_idempotent(self, name):
        """Test that canonicalizing a canonical total graph gives an equivalent form."""
        g, rho = sweep_graph(name)
        form = canonical_form(g, rho)
        again = canonical_form(form.extension.materialize(), rho)
        assert again.d == form.d
        assert extensions_equivalent(form.extension, again.extension) is not None

    @pytest.mark.parametrize("d", [2, 3])
    def test_bernoulli_verdicts_match_conjugacy(self, rho, d):
        """Test YES exactly for simultaneously conjugate transitive cocycles."""
        rng = random.Random(d)
        group = list(Permutation.all(d))
        for k in range(10):
            a1 = transitive_pair(rng, d)
            if k % 2:
                g = rng.choice(group)
                a2 = [g * perm * g.inverse() for perm in a1]
            else:
                a2 = transitive_pair(rng, d)
            e1, e2 = bernoulli_extension(rho, a1), bernoulli_extension(rho, a2)
            verdict = shifts_isomorphic(e1.materialize(), e2.materialize(), rho)
            assert verdict.status is not IsoStatus.UNKNOWN
            expected = simultaneously_conjugate(a1, a2, d)
            assert (verdict.status is IsoStatus.ISO_YES) == expected
