"""Multisets: unordered collections with repetition."""

from __future__ import annotations

from collections import Counter
from typing import Hashable, Iterable, Iterator


class Multiset:
    """A multiset over hashable elements.

    Multiplicities are always >= 1; adding zero copies of an element is a
    no-op and elements cannot be removed.  The *order* of a multiset is the
    sum of its multiplicities.
    """

    __slots__ = ("_counts",)

    def __init__(self, items: Iterable[Hashable] = ()):
        self._counts = Counter(items)

    @classmethod
    def from_counts(cls, counts: dict[Hashable, int]) -> "Multiset":
        ms = cls()
        for x, c in counts.items():
            ms.add(x, c)
        return ms

    def add(self, item: Hashable, count: int = 1) -> None:
        if count < 0:
            raise ValueError(f"multiplicity must be >= 0, got {count}")
        if count:
            self._counts[item] += count

    @property
    def order(self) -> int:
        return sum(self._counts.values())

    def multiplicity(self, item: Hashable) -> int:
        return self._counts.get(item, 0)

    def items(self) -> Iterable[tuple[Hashable, int]]:
        return self._counts.items()

    def elements(self) -> Iterator[Hashable]:
        return self._counts.elements()

    def support(self) -> set:
        return set(self._counts)

    def as_sorted_tuple(self) -> tuple:
        """Canonical form: ((element, multiplicity), ...) sorted by element."""
        return tuple(sorted(self._counts.items()))

    def __contains__(self, item: Hashable) -> bool:
        return self._counts.get(item, 0) > 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._counts == other._counts

    def __len__(self) -> int:
        return self.order

    def __iter__(self) -> Iterator[Hashable]:
        return self._counts.elements()

    def __repr__(self) -> str:
        inner = ", ".join(f"{x!r}: {c}" for x, c in sorted(self._counts.items(), key=repr))
        return "Multiset({" + inner + "})"
