"""
Classification of rho-uniform Markov shifts

Minimal-index search over n-stringings, canonical forms, cocycle
cohomology, equivalence of skew-product extensions, the three-valued
isomorphism verdict and degree-1 common extensions.

A verdict of ISO_NO is only returned when every invariant it rests on is
certified; anything depending on a budget-relative minimum is UNKNOWN.
"""

import enum
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import islice
from typing import Iterator, Mapping, Optional

from loguru import logger

from ..utils.config import SearchSettings
from ..utils.errors import ClassificationError, UnsupportedError
from ..utils.permutation import Permutation
from .contraction import ContractionReport, degree, synchronizing_word
from .extension import (
    Cocycle,
    GspExtension,
    LiftResult,
    base_edge,
    check_base_map,
    extended_letter_maps,
    letter_graph,
    lift_phi_bar,
    persistent_partitions,
    pull_back,
    total_hom,
)
from .graph import (
    Rho,
    StochasticGraph,
    bernoulli_graph,
    check_rho_uniform,
    is_irreducible,
    period,
    stringing,
)
from .homomorphism import (
    ColoringEnumeration,
    GraphHom,
    LetterMaps,
    Word,
    apply_word,
    check_hom,
    letter_maps,
    stringing_projection,
)
from .reduction import ReductionResult, majorizing_homs, reduce_to_irreducible


def _require_classifiable(g: StochasticGraph, rho: Rho) -> None:
    label = g.name or "graph"
    if not is_irreducible(g):
        raise ClassificationError(f"{label} is not irreducible")
    if not check_rho_uniform(g, rho):
        raise ClassificationError(f"{label} is not rho-uniform")


# minimal index


@dataclass(frozen=True)
class SearchLogEntry:
    n: int
    colorings_tried: int
    best_degree: int
    truncated: bool


@dataclass(frozen=True)
class MinimalIndexReport:
    """
    Outcome of the minimal-index search.

    `d_found` is always realized by `coloring`, a coloring of G^(n) for
    n = achieved_at[0]; `certification` names the argument behind
    `certified_minimal` (degree-one, unique-coloring, period, budgeted) or
    why there is none.
    """

    d_found: int
    achieved_at: tuple[int, int]
    coloring: GraphHom
    contraction: ContractionReport
    certified_minimal: bool
    certification: str
    search_log: tuple[SearchLogEntry, ...]
    exhausted: bool


def _coloring_degree(payload: tuple[LetterMaps, int]) -> ContractionReport:
    lm, budget = payload
    return degree(lm, budget)


def _scan(
    enumeration: ColoringEnumeration, budget: int, jobs: int
) -> Iterator[tuple[int, GraphHom, ContractionReport]]:
    """Yield (index, coloring, contraction report) in enumeration order."""
    if jobs <= 1:
        for index, phi in enumerate(enumeration):
            yield index, phi, degree(letter_maps(phi), budget)
        return

    stream = iter(enumeration)
    index = 0
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        while True:
            chunk = list(islice(stream, 16 * jobs))
            if not chunk:
                return
            payloads = [(letter_maps(phi), budget) for phi in chunk]
            for phi, report in zip(chunk, pool.map(_coloring_degree, payloads)):
                yield index, phi, report
                index += 1


def minimal_index(
    g: StochasticGraph, rho: Rho, settings: Optional[SearchSettings] = None
) -> MinimalIndexReport:
    """
    Search the colorings of G^(1), ..., G^(n_max) for the least degree.

    The best coloring is the minimum by (d, n, enumeration index), so the
    result does not depend on `jobs`. The search stops early once the
    minimum is provably reached.

    Args:
        g: An irreducible rho-uniform graph
        rho: The Bernoulli distribution
        settings: Budgets and limits

    Returns:
        MinimalIndexReport

    Raises:
        ClassificationError: If g is reducible or not rho-uniform
    """
    settings = settings or SearchSettings()
    _require_classifiable(g, rho)
    homogeneous_period = period(g) if rho.is_homogeneous() else None

    best: Optional[tuple[int, int, int, GraphHom, ContractionReport]] = None
    log: list[SearchLogEntry] = []
    exhausted = True

    for n in range(1, settings.n_max + 1):
        enumeration = ColoringEnumeration(
            stringing(g, n), rho, settings.coloring_budget, settings.coloring_time_limit
        )
        tried = 0
        best_here = 0
        for index, phi, report in _scan(enumeration, settings.subset_budget, settings.jobs):
            tried += 1
            if not report.exhausted:
                exhausted = False
            if not best_here or report.degree < best_here:
                best_here = report.degree
            if best is None or report.degree < best[0]:
                best = (report.degree, n, index, phi, report)
            if report.degree == 1:
                break
        if enumeration.truncated:
            exhausted = False
        log.append(SearchLogEntry(n, tried, best_here, enumeration.truncated))
        logger.debug(f"n={n}: {tried} colorings, best degree {best_here}")

        assert best is not None
        if best[0] == 1 or rho.is_absolutely_non_homogeneous():
            break
        if homogeneous_period is not None and best[0] == homogeneous_period:
            break

    assert best is not None
    d, n, index, phi, report = best
    if not report.exhausted:
        certified, reason = False, "contraction-truncated"
    elif d == 1:
        certified, reason = True, "degree-one"
    elif rho.is_absolutely_non_homogeneous():
        certified, reason = True, "unique-coloring"
    elif homogeneous_period is not None and d == homogeneous_period:
        certified, reason = True, "period"
    elif exhausted and len(log) == settings.n_max and settings.accept_budgeted_minimality:
        certified, reason = True, "budgeted"
    else:
        certified, reason = False, "uncertified"

    if certified:
        logger.info(f"Minimal index {d} at n={n}, coloring #{index} ({reason})")
    else:
        logger.warning(f"Minimal index {d} at n={n} is only an upper bound ({reason})")
    return MinimalIndexReport(d, (n, index), phi, report, certified, reason, tuple(log), exhausted)


# cohomology


def _bind(w: dict[str, Permutation], vertex: str, value: Permutation, queue: deque) -> bool:
    if vertex in w:
        return w[vertex] == value
    w[vertex] = value
    queue.append(vertex)
    return True


def _propagate(
    base: LetterMaps,
    a1: Cocycle,
    a2: Cocycle,
    root: str,
    value: Permutation,
    incoming: Mapping[str, list[tuple[str, str]]],
) -> Optional[dict[str, Permutation]]:
    w = {root: value}
    queue: deque = deque([root])
    while queue:
        j = queue.popleft()
        for letter in base.letters:
            required = a2[(letter, j)] * w[j] * a1[(letter, j)].inverse()
            if not _bind(w, base.image(letter, j), required, queue):
                return None
        for letter, source in incoming[j]:
            required = a2[(letter, source)].inverse() * w[j] * a1[(letter, source)]
            if not _bind(w, source, required, queue):
                return None
    return w


def cohomologous(
    base: LetterMaps, a1: Cocycle, a2: Cocycle, d: int, d_max: int = 6
) -> Optional[dict[str, Permutation]]:
    """
    Solve a2(i, j) w(j) = w(f_i j) a1(i, j) for w: J -> A_d.

    Each weakly connected component is solved from its first vertex: the
    d! root values are tried in lexicographic order and propagated along
    edges in both directions; every edge is checked.

    Args:
        base: Letter maps over J
        a1: First cocycle, keyed by (letter, j)
        a2: Second cocycle, keyed by (letter, j)
        d: Fiber size
        d_max: Largest supported d

    Returns:
        The first solution found, or None when the cocycles are not cohomologous

    Raises:
        UnsupportedError: If d exceeds d_max
    """
    if d > d_max:
        raise UnsupportedError(f"Fiber size {d} exceeds the configured maximum d_max={d_max}")
    incoming: dict[str, list[tuple[str, str]]] = {j: [] for j in base.vertices}
    for letter in base.letters:
        for j in base.vertices:
            incoming[base.image(letter, j)].append((letter, j))

    solution: dict[str, Permutation] = {}
    for root in base.vertices:
        if root in solution:
            continue
        for value in Permutation.all(d):
            component = _propagate(base, a1, a2, root, value, incoming)
            if component is not None:
                solution.update(component)
                break
        else:
            return None
    return solution


# equivalence of extensions


@dataclass(frozen=True)
class EquivalenceCertificate:
    """kappa: J1 -> J2 conjugating the letter maps and w solving the cocycle equation."""

    kappa: dict[str, str]
    w: dict[str, Permutation]


def _signatures(base: LetterMaps) -> dict[str, tuple]:
    indegree = {j: [0] * len(base.letters) for j in base.vertices}
    for k, row in enumerate(base.table):
        for target in row:
            indegree[base.vertices[target]][k] += 1
    return {
        j: (
            tuple(row[u] == u for row in base.table),
            tuple(indegree[j]),
        )
        for u, j in enumerate(base.vertices)
    }


def _propagate_iso(
    base1: LetterMaps,
    base2: LetterMaps,
    sig1: Mapping[str, tuple],
    sig2: Mapping[str, tuple],
    kappa: Mapping[str, str],
    j: str,
    candidate: str,
) -> Optional[dict[str, str]]:
    extended = dict(kappa)
    extended[j] = candidate
    used = set(extended.values())
    queue = deque([j])
    while queue:
        x = queue.popleft()
        for letter in base1.letters:
            fx = base1.image(letter, x)
            target = base2.image(letter, extended[x])
            if fx in extended:
                if extended[fx] != target:
                    return None
            elif target in used or sig1[fx] != sig2[target]:
                return None
            else:
                extended[fx] = target
                used.add(target)
                queue.append(fx)
    return extended


def _extend_iso(
    base1: LetterMaps,
    base2: LetterMaps,
    sig1: Mapping[str, tuple],
    sig2: Mapping[str, tuple],
    kappa: dict[str, str],
) -> Iterator[dict[str, str]]:
    if len(kappa) == base1.size:
        yield kappa
        return
    j = next(v for v in base1.vertices if v not in kappa)
    used = set(kappa.values())
    for candidate in base2.vertices:
        if candidate in used or sig2[candidate] != sig1[j]:
            continue
        extended = _propagate_iso(base1, base2, sig1, sig2, kappa, j, candidate)
        if extended is not None:
            yield from _extend_iso(base1, base2, sig1, sig2, extended)


def base_isomorphisms(base1: LetterMaps, base2: LetterMaps) -> Iterator[dict[str, str]]:
    """All bijections kappa with kappa o f1_i = f2_i o kappa, in deterministic order."""
    if base1.letters != base2.letters or base1.size != base2.size:
        return
    sig1, sig2 = _signatures(base1), _signatures(base2)
    if sorted(sig1.values()) != sorted(sig2.values()):
        return
    yield from _extend_iso(base1, base2, sig1, sig2, {})


def _equivalence_search(
    e1: GspExtension, e2: GspExtension, d_max: int
) -> tuple[Optional[EquivalenceCertificate], int]:
    a1 = e1.cocycle_map()
    tried = 0
    for kappa in base_isomorphisms(e1.base, e2.base):
        tried += 1
        transported = {(letter, j): e2.a(letter, kappa[j]) for letter, j in a1}
        w = cohomologous(e1.base, a1, transported, e1.d, d_max)
        if w is not None:
            return EquivalenceCertificate(kappa, w), tried
    return None, tried


def extensions_equivalent(
    e1: GspExtension, e2: GspExtension, d_max: int = 6
) -> Optional[EquivalenceCertificate]:
    """
    Decide whether two (pi, psi)-pairs are equivalent.

    Returns:
        A certificate (kappa, w) with kappa-bar(i, j, y) = (i, kappa j, w(j) y),
        or None

    Raises:
        ClassificationError: If the pairs are over different rho
    """
    if e1.rho != e2.rho:
        raise ClassificationError("Extensions are over different Bernoulli distributions")
    if e1.d != e2.d or len(e1.vertices) != len(e2.vertices):
        return None
    return _equivalence_search(e1, e2, d_max)[0]


def verify_certificate(
    e1: GspExtension, e2: GspExtension, certificate: EquivalenceCertificate
) -> bool:
    """Re-check a certificate from scratch: kappa conjugacy, the cocycle equation and kappa-bar."""
    kappa, w = certificate.kappa, certificate.w
    if e1.rho != e2.rho or e1.d != e2.d:
        logger.warning("Certificate check: rho or fiber size differ")
        return False
    if set(kappa) != set(e1.vertices) or sorted(kappa.values()) != sorted(e2.vertices):
        logger.warning("Certificate check: kappa is not a bijection J1 -> J2")
        return False
    if set(w) != set(e1.vertices) or any(value.degree != e1.d for value in w.values()):
        logger.warning("Certificate check: w is not a map J1 -> A_d")
        return False
    for letter, j, a1 in e1.cocycle_items():
        if kappa[e1.base.image(letter, j)] != e2.base.image(letter, kappa[j]):
            logger.warning(f"Certificate check: kappa breaks letter {letter!r} at {j!r}")
            return False
        if e2.a(letter, kappa[j]) * w[j] != w[e1.base.image(letter, j)] * a1:
            logger.warning(f"Certificate check: cocycle equation fails at ({letter}, {j})")
            return False
    try:
        total_hom(e1, e2, kappa, w)
    except ValueError as e:
        logger.warning(f"Certificate check: kappa-bar is not a homomorphism: {e}")
        return False
    return True


# canonical forms


@dataclass(frozen=True)
class CanonicalForm:
    """
    The irreducible pair at the minimal index found, with its provenance.

    `provenance` lists the degree-1 homomorphisms linking G to the
    canonical total graph: pi^(n), psi-bar and, when reduced, kappa and
    kappa-bar.
    """

    extension: GspExtension
    d: int
    certified: bool
    minimal: MinimalIndexReport
    lift: LiftResult
    reduction: Optional[ReductionResult]
    projection: GraphHom
    provenance: tuple[tuple[str, GraphHom], ...]
    caveats: tuple[str, ...] = ()

    def coordinates(self) -> tuple[dict[str, str], dict[str, Permutation]]:
        """Block representative and relabeling w(j) of every lifted base vertex."""
        vertices = self.lift.extension.vertices
        if self.reduction is None:
            identity = Permutation.identity(self.d)
            return {j: j for j in vertices}, {j: identity for j in vertices}
        representative = {
            j: block[0] for block in self.reduction.xi_star.blocks for j in block
        }
        return representative, dict(self.reduction.relabeling)


def canonical_form(
    g: StochasticGraph, rho: Rho, settings: Optional[SearchSettings] = None
) -> CanonicalForm:
    """
    minimal_index, lift of the achieving coloring, reduction to irreducible form.

    When the persistent-partition search runs out of budget the unreduced
    lift is returned, marked uncertified with a caveat.

    Raises:
        ClassificationError: If g is not classifiable or the achieving
            coloring's degree is not certified
    """
    settings = settings or SearchSettings()
    minimal = minimal_index(g, rho, settings)
    if not minimal.contraction.exhausted:
        raise ClassificationError(
            "Contraction search of the best coloring was truncated; raise subset_budget"
        )
    projection = stringing_projection(g, minimal.achieved_at[0])
    lift = lift_phi_bar(minimal.coloring.source, minimal.coloring, settings.subset_budget)

    caveats = []
    provenance = [("pi^(n)", projection), ("psi-bar", lift.psi_bar)]
    persistent = persistent_partitions(lift.extension, settings.persistent_budget)
    reduction: Optional[ReductionResult] = None
    if persistent.exhausted:
        reduction = reduce_to_irreducible(
            lift.extension, settings.persistent_budget, persistent
        )
        kappa, kappa_bar = majorizing_homs(lift.extension, reduction)
        provenance += [("kappa", kappa), ("kappa-bar", kappa_bar)]
        extension = reduction.quotient
    else:
        caveats.append("persistent-partition search truncated; form is not reduced")
        extension = lift.extension

    # kappa-bar has degree 1 exactly when the quotient keeps degree d
    if degree(extended_letter_maps(extension), settings.subset_budget).degree != minimal.d_found:
        raise ClassificationError("Canonical extension does not have the minimal degree")
    if not minimal.certified_minimal:
        caveats.append(f"minimal index not certified ({minimal.certification})")

    certified = minimal.certified_minimal and reduction is not None
    logger.info(
        f"Canonical form of {g.name or 'graph'}: d={minimal.d_found}, "
        f"|J*|={len(extension.vertices)}, certified={certified}"
    )
    return CanonicalForm(
        extension,
        minimal.d_found,
        certified,
        minimal,
        lift,
        reduction,
        projection,
        tuple(provenance),
        tuple(caveats),
    )


# isomorphism verdict


class IsoStatus(str, enum.Enum):
    ISO_YES = "yes"
    ISO_NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class IsoVerdict:
    """
    Verdict with its justification.

    `reason` names the deciding invariant: equivalent-canonical-forms,
    period-mismatch, minimal-index-mismatch, canonical-base-non-isomorphic,
    cohomology-obstruction or search-budget.
    """

    status: IsoStatus
    reason: str
    periods: tuple[int, int]
    certificate: Optional[EquivalenceCertificate] = None
    canon1: Optional[CanonicalForm] = None
    canon2: Optional[CanonicalForm] = None
    caveats: tuple[str, ...] = ()

    @property
    def degrees(self) -> tuple[Optional[int], Optional[int]]:
        return (
            self.canon1.d if self.canon1 else None,
            self.canon2.d if self.canon2 else None,
        )

    @property
    def certified(self) -> bool:
        return bool(self.canon1 and self.canon2 and self.canon1.certified and self.canon2.certified)


def shifts_isomorphic(
    g1: StochasticGraph,
    g2: StochasticGraph,
    rho: Rho,
    settings: Optional[SearchSettings] = None,
) -> IsoVerdict:
    """
    Decide whether T_g1 and T_g2 are isomorphic.

    Periods are compared first, then canonical forms: their minimal
    indices, then equivalence of the canonical pairs.

    Raises:
        ClassificationError: If either graph is reducible or not rho-uniform
    """
    settings = settings or SearchSettings()
    _require_classifiable(g1, rho)
    _require_classifiable(g2, rho)

    periods = (period(g1), period(g2))
    if periods[0] != periods[1]:
        logger.info(f"Periods differ: {periods[0]} vs {periods[1]}")
        return IsoVerdict(IsoStatus.ISO_NO, "period-mismatch", periods)

    try:
        canon1 = canonical_form(g1, rho, settings)
        canon2 = canonical_form(g2, rho, settings)
    except ClassificationError as e:
        logger.warning(f"Verdict is unknown: {e}")
        return IsoVerdict(IsoStatus.UNKNOWN, "search-budget", periods, caveats=(str(e),))

    caveats = canon1.caveats + canon2.caveats
    both_certified = canon1.certified and canon2.certified

    if canon1.d != canon2.d:
        status = IsoStatus.ISO_NO if both_certified else IsoStatus.UNKNOWN
        return _verdict(status, "minimal-index-mismatch", periods, None, canon1, canon2, caveats)

    certificate, bases = _equivalence_search(canon1.extension, canon2.extension, settings.d_max)
    if certificate is not None:
        return _verdict(
            IsoStatus.ISO_YES,
            "equivalent-canonical-forms",
            periods,
            certificate,
            canon1,
            canon2,
            caveats,
        )
    reason = "cohomology-obstruction" if bases else "canonical-base-non-isomorphic"
    status = IsoStatus.ISO_NO if both_certified else IsoStatus.UNKNOWN
    return _verdict(status, reason, periods, None, canon1, canon2, caveats)


def _verdict(
    status: IsoStatus,
    reason: str,
    periods: tuple[int, int],
    certificate: Optional[EquivalenceCertificate],
    canon1: CanonicalForm,
    canon2: CanonicalForm,
    caveats: tuple[str, ...],
) -> IsoVerdict:
    if status is IsoStatus.UNKNOWN:
        logger.warning(f"Verdict is unknown ({reason}); minimality is budget-relative")
    else:
        logger.info(f"Verdict {status.value} ({reason})")
    return IsoVerdict(status, reason, periods, certificate, canon1, canon2, caveats)


# Bernoulli extensions


def satisfies_modular_condition(rho: Rho, cocycle: Mapping[str, Permutation]) -> bool:
    """rho(i) = rho(i') implies a(i) = a(i') for a cocycle on the Bernoulli graph."""
    for _, letters in rho.weight_classes():
        if len({cocycle[letter] for letter in letters}) > 1:
            return False
    return True


# common extensions


@dataclass(frozen=True)
class CommonBase:
    """Synchronized-pair base over two 1-contractive bases and its degree-1 maps."""

    base: LetterMaps
    chi1: dict[str, str]
    chi2: dict[str, str]
    chi1_hom: GraphHom
    chi2_hom: GraphHom
    psi: GraphHom
    sync_word: Word


def common_extension_degree1(
    base1: LetterMaps, base2: LetterMaps, rho: Rho, budget: int = 2**20
) -> CommonBase:
    """
    The common degree-1 extension of two synchronizing bases.

    J is the forward orbit under (f1_i, f2_i) of the pair reached by a word
    synchronizing both automata; pair vertices are named `j1&j2` in
    breadth-first order.

    Raises:
        ClassificationError: If a base does not synchronize or the result
            does not have degree 1
    """
    if base1.letters != rho.letters or base2.letters != rho.letters:
        raise ClassificationError("Bases and rho use different letters")
    first = synchronizing_word(base1)
    second = synchronizing_word(base2)
    if first is None or second is None:
        raise ClassificationError("Both bases must be 1-contractive")
    word = second + first
    start = (
        apply_word(base1, word, base1.vertices[0]),
        apply_word(base2, word, base2.vertices[0]),
    )

    order = [start]
    seen = {start}
    queue = deque([start])
    while queue:
        j1, j2 = queue.popleft()
        for letter in rho.letters:
            following = (base1.image(letter, j1), base2.image(letter, j2))
            if following not in seen:
                seen.add(following)
                order.append(following)
                queue.append(following)

    names = {pair: f"{pair[0]}&{pair[1]}" for pair in order}
    maps = {
        letter: {
            names[pair]: names[(base1.image(letter, pair[0]), base2.image(letter, pair[1]))]
            for pair in order
        }
        for letter in rho.letters
    }
    base = LetterMaps.from_functions(rho.letters, [names[pair] for pair in order], maps)
    chi1 = {names[pair]: pair[0] for pair in order}
    chi2 = {names[pair]: pair[1] for pair in order}
    check_base_map(base, base1, chi1)
    check_base_map(base, base2, chi2)

    h = letter_graph(base, rho)
    chi_homs = []
    for target, chi in ((base1, chi1), (base2, chi2)):
        edge_map = {
            base_edge(letter, p): base_edge(letter, chi[p])
            for letter in rho.letters
            for p in base.vertices
        }
        chi_homs.append(check_hom(edge_map, h, letter_graph(target, rho)))
    psi = check_hom(
        {base_edge(letter, p): letter for letter in rho.letters for p in base.vertices},
        h,
        bernoulli_graph(rho),
    )
    if degree(base, budget).degree != 1:
        raise ClassificationError("Pair base is not 1-contractive")
    logger.debug(f"Common base: {base1.size} x {base2.size} -> {base.size} pairs")
    return CommonBase(base, chi1, chi2, chi_homs[0], chi_homs[1], psi, word)


@dataclass(frozen=True)
class CommonExtension:
    """A graph with degree-1 homomorphisms onto both input graphs."""

    graph: StochasticGraph
    extension: GspExtension
    phi1: GraphHom
    phi2: GraphHom
    common_base: CommonBase


def common_extension_shifts(
    g1: StochasticGraph,
    g2: StochasticGraph,
    rho: Rho,
    settings: Optional[SearchSettings] = None,
    verdict: Optional[IsoVerdict] = None,
) -> CommonExtension:
    """
    Assemble a degree-1 common extension of two isomorphic shifts.

    Over the pair base of the two lifted bases the lift cocycle of g1 is
    pulled back. The map to the second lift uses the fiber bijection
    V(j1, j2) = w2(j2)^-1 W([j1]) w1(j1), where w1, w2 are the reduction
    relabelings and W the certificate. Both composites are validated as
    homomorphisms and their degree is checked.

    Raises:
        ClassificationError: Without an ISO_YES verdict, or if a check fails
    """
    settings = settings or SearchSettings()
    if verdict is None:
        verdict = shifts_isomorphic(g1, g2, rho, settings)
    if (
        verdict.status is not IsoStatus.ISO_YES
        or verdict.certificate is None
        or verdict.canon1 is None
        or verdict.canon2 is None
    ):
        raise ClassificationError("A common extension needs an ISO_YES verdict with a certificate")
    canon1, canon2, certificate = verdict.canon1, verdict.canon2, verdict.certificate
    lift1, lift2 = canon1.lift.extension, canon2.lift.extension
    representative1, relabeling1 = canon1.coordinates()
    representative2, relabeling2 = canon2.coordinates()

    common = common_extension_degree1(lift1.base, lift2.base, rho, settings.subset_budget)
    pulled = pull_back(lift1, common.base, common.chi1)

    fiber_maps = {}
    for p in common.base.vertices:
        j1, j2 = common.chi1[p], common.chi2[p]
        q1 = representative1[j1]
        if certificate.kappa[q1] != representative2[j2]:
            raise ClassificationError(f"Pair {p!r} does not lie over the certified base map")
        fiber_maps[p] = relabeling2[j2].inverse() * certificate.w[q1] * relabeling1[j1]

    to_lift1 = total_hom(pulled, lift1, common.chi1)
    to_lift2 = total_hom(pulled, lift2, common.chi2, fiber_maps)
    phi1 = canon1.projection.compose(canon1.lift.psi_bar.compose(to_lift1))
    phi2 = canon2.projection.compose(canon2.lift.psi_bar.compose(to_lift2))

    if degree(extended_letter_maps(pulled), settings.subset_budget).degree != pulled.d:
        raise ClassificationError("Common extension does not have the canonical degree")
    graph = pulled.materialize()
    logger.info(
        f"Common extension: {len(graph.vertices)} vertices, {len(graph.edges)} edges"
    )
    return CommonExtension(graph, pulled, phi1, phi2, common)


__all__ = [
    "CanonicalForm",
    "CommonBase",
    "CommonExtension",
    "EquivalenceCertificate",
    "IsoStatus",
    "IsoVerdict",
    "MinimalIndexReport",
    "SearchLogEntry",
    "base_isomorphisms",
    "canonical_form",
    "cohomologous",
    "common_extension_degree1",
    "common_extension_shifts",
    "extensions_equivalent",
    "minimal_index",
    "satisfies_modular_condition",
    "shifts_isomorphic",
    "verify_certificate",
]
