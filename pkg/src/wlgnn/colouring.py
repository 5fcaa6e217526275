"""Canonical colourings of vertex tuples.

Colours are interned: a ``ColourInterner`` maps canonical colour-tree
serialisations to dense integer ids, bijectively.  Because the
serialisation of a refined colour is built from the parent colour id and
a sorted multiset of constituent ids, structurally equal colour trees get
equal ids across graphs and runs sharing an interner.  This makes
cross-graph colour equality a plain integer comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .multiset import Multiset

ColourId = int


class ColourInterner:
    """Bijection between canonical colour serialisations and dense ids."""

    def __init__(self):
        self._ids: dict[Hashable, ColourId] = {}
        self._keys: list[Hashable] = []

    def intern(self, key: Hashable) -> ColourId:
        cid = self._ids.get(key)
        if cid is None:
            cid = len(self._keys)
            self._ids[key] = cid
            self._keys.append(key)
        return cid

    def key_of(self, cid: ColourId) -> Hashable:
        return self._keys[cid]

    def __len__(self) -> int:
        return len(self._keys)


_DEFAULT_INTERNER = ColourInterner()


def default_interner() -> ColourInterner:
    """The process-wide interner used when none is passed explicitly."""
    return _DEFAULT_INTERNER


@dataclass(frozen=True)
class Colouring:
    """A total colouring of V(G)^k by interned colour ids.

    For arity 1 the keys are plain vertex ids; for arity k >= 2 they are
    k-tuples.  ``round_index`` is the refinement round the colouring was
    produced in (None for colourings not arising from a refinement run).
    """

    arity: int
    assignment: dict  # key -> ColourId
    interner: ColourInterner
    round_index: int | None = None

    def colour(self, key) -> ColourId:
        return self.assignment[key]

    def keys(self):
        return self.assignment.keys()

    def classes(self) -> dict[ColourId, list]:
        out: dict[ColourId, list] = {}
        for key, cid in self.assignment.items():
            out.setdefault(cid, []).append(key)
        return out

    def num_classes(self) -> int:
        return len(set(self.assignment.values()))

    def partition(self) -> frozenset[frozenset]:
        """The induced partition of the key set, forgetting colour values."""
        return frozenset(frozenset(keys) for keys in self.classes().values())


def _check_compatible(chi: Colouring, chi2: Colouring) -> None:
    if chi.arity != chi2.arity:
        raise ValueError("colourings have different arities")
    if chi.assignment.keys() != chi2.assignment.keys():
        raise ValueError("colourings are over different vertex universes")


def refines(chi: Colouring, chi2: Colouring) -> bool:
    """True iff every colour class of chi is contained in a class of chi2."""
    _check_compatible(chi, chi2)
    seen: dict[ColourId, ColourId] = {}
    for key, c in chi.assignment.items():
        c2 = chi2.assignment[key]
        prev = seen.get(c)
        if prev is None:
            seen[c] = c2
        elif prev != c2:
            return False
    return True


def equivalent(chi: Colouring, chi2: Colouring) -> bool:
    """True iff the two colourings induce the same partition."""
    return refines(chi, chi2) and refines(chi2, chi)


def hat_invariant(chi: Colouring) -> Multiset:
    """The multiset of all tuple colours; lifts a k-ary colouring to a
    graph-level value comparable across graphs sharing the interner."""
    return Multiset(chi.assignment.values())


def colouring_from_values(values: Iterable, arity: int = 1,
                          interner: ColourInterner | None = None,
                          keys: Iterable | None = None) -> Colouring:
    """Convenience constructor interning arbitrary hashable per-key values."""
    interner = interner if interner is not None else default_interner()
    values = list(values)
    if keys is None:
        keys = range(len(values))
    assignment = {k: interner.intern(("adhoc", v)) for k, v in zip(keys, values)}
    return Colouring(arity, assignment, interner)
