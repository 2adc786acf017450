"""
Contraction analysis of letter-map semigroups

The degree d(phi) is the least cardinality of an image f_w(U); the images
of that size are the persistent d-sets. Both come out of one search over
the subset-image graph S -> f_i(S).
"""

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Optional

from loguru import logger

from .homomorphism import LetterMaps, Word

Subset = tuple[int, ...]


@dataclass(frozen=True)
class ContractionReport:
    """Result of a degree computation."""

    degree: int
    witness_word: Word
    persistent_sets: tuple[frozenset[str], ...]
    exhausted: bool
    visited: int = 0


def _image(lm: LetterMaps, letter: int, subset: Subset) -> Subset:
    row = lm.table[letter]
    return tuple(sorted({row[u] for u in subset}))


def degree(lm: LetterMaps, budget: int = 2**20) -> ContractionReport:
    """
    Compute d(phi) by best-first search over subset images.

    States are popped in (cardinality, discovery) order, so the first
    minimal image yields a short witness. Persistent sets are then closed
    under every f_i.

    Args:
        lm: Letter maps on a finite vertex set U
        budget: Maximum number of visited subsets

    Returns:
        ContractionReport; when the budget runs out `exhausted` is false and
        `degree` is only an upper bound
    """
    start: Subset = tuple(range(lm.size))
    parent: dict[Subset, Optional[tuple[Subset, int]]] = {start: None}
    heap = [(len(start), 0, start)]
    counter = 1
    best = start
    exhausted = True

    while heap:
        size, _, subset = heapq.heappop(heap)
        if size < len(best):
            best = subset
        if len(best) == 1:
            break
        for letter in range(len(lm.letters)):
            image = _image(lm, letter, subset)
            if image in parent:
                continue
            if len(parent) >= budget:
                exhausted = False
                heap.clear()
                break
            parent[image] = (subset, letter)
            heapq.heappush(heap, (len(image), counter, image))
            counter += 1
            if len(image) < len(best):
                best = image

    witness: list[str] = []
    state = best
    while parent[state] is not None:
        previous, letter = parent[state]
        witness.append(lm.letters[letter])
        state = previous
    # letters were collected last-applied first, which is already the
    # left-to-right order of the word f_{i1} o ... o f_{in}

    minimal = {s for s in parent if len(s) == len(best)}
    frontier = deque(sorted(minimal))
    while frontier:
        subset = frontier.popleft()
        for letter in range(len(lm.letters)):
            image = _image(lm, letter, subset)
            if image not in minimal:
                minimal.add(image)
                frontier.append(image)

    persistent = tuple(
        frozenset(lm.vertices[u] for u in subset) for subset in sorted(minimal)
    )
    if not exhausted:
        logger.warning(
            f"Subset search truncated at {len(parent)} states; degree <= {len(best)}"
        )
    logger.debug(f"Degree {len(best)} with {len(persistent)} persistent sets")
    return ContractionReport(len(best), tuple(witness), persistent, exhausted, len(parent))


def persistent_set_indices(lm: LetterMaps, report: ContractionReport) -> list[Subset]:
    """Persistent sets as sorted index tuples, ordered lexicographically."""
    position = {v: k for k, v in enumerate(lm.vertices)}
    return sorted(tuple(sorted(position[v] for v in s)) for s in report.persistent_sets)


def _merging_word(lm: LetterMaps, a: int, b: int) -> Optional[Word]:
    """Shortest word w with f_w(a) = f_w(b), by BFS over pairs."""
    start = (min(a, b), max(a, b))
    parent: dict[tuple[int, int], Optional[tuple[tuple[int, int], int]]] = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        if pair[0] == pair[1]:
            word = []
            state = pair
            while parent[state] is not None:
                previous, letter = parent[state]
                word.append(lm.letters[letter])
                state = previous
            return tuple(word)
        for letter, row in enumerate(lm.table):
            x, y = row[pair[0]], row[pair[1]]
            image = (min(x, y), max(x, y))
            if image not in parent:
                parent[image] = (pair, letter)
                queue.append(image)
    return None


def synchronizing_word(lm: LetterMaps) -> Optional[Word]:
    """
    A word w with |f_w(U)| = 1, or None when the maps do not synchronize.

    Pair merging: while the current image has two points, find a word that
    merges them and apply it on the left.
    """
    current = set(range(lm.size))
    word: Word = ()
    while len(current) > 1:
        a, b = sorted(current)[:2]
        merge = _merging_word(lm, a, b)
        if merge is None:
            return None
        for letter in reversed(merge):
            row = lm.table[lm.letter_index(letter)]
            current = {row[u] for u in current}
        word = merge + word
    return word


def is_d_contractive(lm: LetterMaps, d: int, budget: int = 2**20) -> Optional[bool]:
    """
    True iff the semigroup is d-contractive.

    Returns None when the search was truncated and the answer is undetermined.
    """
    report = degree(lm, budget)
    if not report.exhausted:
        if report.degree < d:
            return False
        return None
    return report.degree == d


def word_image(lm: LetterMaps, word: Word, subset: Optional[set[str]] = None) -> frozenset[str]:
    """f_w(E) for E = `subset` (default: all of U)."""
    points = (
        {lm.vertex_index(v) for v in subset} if subset is not None else set(range(lm.size))
    )
    for letter in reversed(word):
        row = lm.table[lm.letter_index(letter)]
        points = {row[u] for u in points}
    return frozenset(lm.vertices[u] for u in points)


__all__ = [
    "ContractionReport",
    "degree",
    "is_d_contractive",
    "persistent_set_indices",
    "synchronizing_word",
    "word_image",
]
