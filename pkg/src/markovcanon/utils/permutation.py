"""
Permutations of the fiber Y_d = {0, ..., d-1}

Internally 0-based; written and read in 1-based one-line notation `[2 1]`.
Composition follows function composition: (a * b)(y) = a(b(y)).
"""

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection of {0, ..., d-1} stored as its tuple of images."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"Not a permutation: {list(self.images)}")

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls(tuple(range(d)))

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "Permutation":
        return cls(tuple(images))

    @classmethod
    def transposition(cls, d: int, a: int, b: int) -> "Permutation":
        images = list(range(d))
        images[a], images[b] = images[b], images[a]
        return cls(tuple(images))

    @classmethod
    def all(cls, d: int) -> Iterator["Permutation"]:
        """All d! permutations in lexicographic order of their image tuples."""
        for images in permutations(range(d)):
            yield cls(images)

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """
        Parse 1-based one-line notation.

        Args:
            text: For example `[2 3 1]`

        Returns:
            The corresponding Permutation

        Raises:
            ValueError: If the text is not bracketed or not a permutation
        """
        token = text.strip()
        if not (token.startswith("[") and token.endswith("]")):
            raise ValueError(f"Permutation must be bracketed: {text!r}")
        body = token[1:-1].split()
        if not body:
            raise ValueError("Empty permutation")
        try:
            images = tuple(int(item) - 1 for item in body)
        except ValueError:
            raise ValueError(f"Non-integer entry in permutation: {text!r}")
        return cls(images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, y: int) -> int:
        return self.images[y]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.degree != other.degree:
            raise ValueError(
                f"Cannot compose permutations of degree {self.degree} and {other.degree}"
            )
        return Permutation(tuple(self.images[y] for y in other.images))

    def inverse(self) -> "Permutation":
        inverse = [0] * self.degree
        for y, image in enumerate(self.images):
            inverse[image] = y
        return Permutation(tuple(inverse))

    def is_identity(self) -> bool:
        return all(y == image for y, image in enumerate(self.images))

    def __str__(self) -> str:
        return "[" + " ".join(str(image + 1) for image in self.images) + "]"


def generated_group(generators: Iterable[Permutation], d: int) -> frozenset[Permutation]:
    """Closure of `generators` under composition (the identity is always included)."""
    group = {Permutation.identity(d)}
    frontier = list(group)
    gens = list(generators)
    while frontier:
        element = frontier.pop()
        for generator in gens:
            product = generator * element
            if product not in group:
                group.add(product)
                frontier.append(product)
    return frozenset(group)


def is_transitive(generators: Iterable[Permutation], d: int) -> bool:
    """True iff the group generated by `generators` acts transitively on Y_d."""
    gens = list(generators)
    orbit = {0}
    frontier = [0]
    while frontier:
        y = frontier.pop()
        for generator in gens:
            image = generator(y)
            if image not in orbit:
                orbit.add(image)
                frontier.append(image)
    return len(orbit) == d
