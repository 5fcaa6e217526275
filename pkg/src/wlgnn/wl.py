"""Colour refinement, k-WL, oblivious k-WL, and distinguishability.

All three algorithms iterate "new colour = (old colour, local census)"
updates:

* colour refinement: census of neighbour colours only;
* 1-WL and k-WL: census over *all* vertices, each contribution carrying
  the atomic type of the extended tuple and the colours of all single
  substitutions taken jointly;
* oblivious k-WL: one census per substitution position, kept separately.

Colours are interned canonically (see :mod:`wlgnn.colouring`), so colour
equality is meaningful across graphs and across rounds of different runs
sharing an interner.  Stabilisation is detected on partitions, not ids:
because each refined colour embeds its parent id, classes only ever
split, and a round with no split anywhere freezes all later partitions
and cross-graph equalities.  Synchronised pair runs exploit this to give
exact verdicts "at infinity".
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from .colouring import (ColourId, Colouring, ColourInterner, default_interner,
                        equivalent, hat_invariant)
from .graphs import BinaryStructure, LabelledGraph, atomic_type

DEFAULT_TUPLE_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    pass


def tuple_budget() -> int:
    value = os.environ.get("WLGNN_BUDGET_TUPLES")
    return int(value) if value else DEFAULT_TUPLE_BUDGET


def _check_tuple_budget(n: int, k: int, budget: int | None) -> None:
    limit = budget if budget is not None else tuple_budget()
    if n**k > limit:
        raise BudgetExceeded(f"{n}^{k} tuples exceed the budget of {limit}")


# ---------------------------------------------------------------------------
# Per-algorithm steppers: produce canonical colour-tree serialisations
# ---------------------------------------------------------------------------

def _histogram(ids) -> tuple:
    counts: dict = {}
    for c in ids:
        counts[c] = counts.get(c, 0) + 1
    return tuple(sorted(counts.items()))


class _CrStepper:
    algorithm = "cr"
    k = 1

    def keys(self, G: LabelledGraph):
        return list(G.vertices)

    def initial(self, G: LabelledGraph):
        return {v: ("cr", 0, G.label_bits(v)) for v in G.vertices}

    def step(self, G: LabelledGraph, colours: dict, t: int):
        out = {}
        for v in G.vertices:
            hist = _histogram(colours[w] for w in G.neighbours(v))
            out[v] = ("cr", t, colours[v], hist)
        return out


class _WlStepper:
    algorithm = "wl"

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("wl needs k >= 1")
        self.k = k

    def keys(self, G):
        if self.k == 1:
            return list(G.vertices)
        return list(itertools.product(G.vertices, repeat=self.k))

    def initial(self, G):
        if self.k == 1:
            return {v: ("wl", 1, 0, atomic_type(G, (v,))) for v in G.vertices}
        return {
            vs: ("wl", self.k, 0, atomic_type(G, vs)) for vs in self.keys(G)
        }

    def step(self, G, colours: dict, t: int):
        k = self.k
        out = {}
        for key in colours:
            vs = (key,) if k == 1 else key
            entries = []
            for w in G.vertices:
                subst = []
                for i in range(k):
                    rep = list(vs)
                    rep[i] = w
                    rep_key = rep[0] if k == 1 else tuple(rep)
                    subst.append(colours[rep_key])
                entries.append((atomic_type(G, vs + (w,)), *subst))
            out[key] = ("wl", k, t, colours[key], _histogram(entries))
        return out


class _OwlStepper:
    algorithm = "owl"

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("owl needs k >= 1")
        self.k = k

    def keys(self, G):
        if self.k == 1:
            return list(G.vertices)
        return list(itertools.product(G.vertices, repeat=self.k))

    def initial(self, G):
        if self.k == 1:
            return {v: ("owl", 1, 0, atomic_type(G, (v,))) for v in G.vertices}
        return {
            vs: ("owl", self.k, 0, atomic_type(G, vs)) for vs in self.keys(G)
        }

    def step(self, G, colours: dict, t: int):
        k = self.k
        out = {}
        for key in colours:
            vs = (key,) if k == 1 else key
            hists = []
            for i in range(k):
                ids = []
                for w in G.vertices:
                    rep = list(vs)
                    rep[i] = w
                    rep_key = rep[0] if k == 1 else tuple(rep)
                    ids.append(colours[rep_key])
                hists.append(_histogram(ids))
            out[key] = ("owl", k, t, colours[key], *hists)
        return out


def _stepper(algorithm: str, k: int):
    if algorithm == "cr":
        if k != 1:
            raise ValueError("colour refinement is unary")
        return _CrStepper()
    if algorithm == "wl":
        return _WlStepper(k)
    if algorithm == "owl":
        return _OwlStepper(k)
    raise ValueError(f"unknown algorithm {algorithm!r}")


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------

@dataclass
class WlRun:
    """A refinement run: the per-round colourings of one graph.

    ``t_inf`` is the first round whose partition equals the next round's
    (None if the run was cut off by ``t_max`` before stabilising);
    ``stabilisation_checked`` records that the equivalence of rounds
    ``t_inf`` and ``t_inf + 1`` was verified, not assumed.  A run from a
    synchronised pair may store rounds past ``t_inf``: partitions are
    frozen there but cross-graph bookkeeping continues.
    """

    algorithm: str
    k: int
    graph: LabelledGraph | BinaryStructure
    colourings: list[Colouring]
    t_inf: int | None
    stabilisation_checked: bool
    interner: ColourInterner

    @property
    def last_round(self) -> int:
        return len(self.colourings) - 1

    def colouring_at(self, t: int) -> Colouring:
        if not (0 <= t <= self.last_round):
            raise IndexError(f"round {t} not computed (have 0..{self.last_round})")
        return self.colourings[t]

    def stable_colouring(self) -> Colouring:
        if self.t_inf is None:
            raise ValueError("run did not reach stabilisation")
        return self.colourings[self.t_inf]

    def colour(self, key, t: int) -> ColourId:
        return self.colouring_at(t).colour(key)


def _intern_round(keys_to_trees: dict, arity: int, interner: ColourInterner,
                  t: int) -> Colouring:
    assignment = {key: interner.intern(tree) for key, tree in keys_to_trees.items()}
    return Colouring(arity, assignment, interner, round_index=t)


def refine(G, algorithm: str = "cr", k: int = 1, t_max: int | None = None,
           interner: ColourInterner | None = None,
           budget: int | None = None) -> WlRun:
    """Run one refinement algorithm on one graph.

    ``t_max=None`` runs to stabilisation; an integer stops after that many
    rounds (earlier if stable).  The stored rounds are 0..t_inf when the
    run stabilises.
    """
    if G.n < 1:
        raise ValueError("refinement needs a nonempty graph")
    stepper = _stepper(algorithm, k)
    _check_tuple_budget(G.n, stepper.k, budget)
    interner = interner if interner is not None else default_interner()

    trees = stepper.initial(G)
    current = _intern_round(trees, stepper.k, interner, 0)
    colourings = [current]
    t_inf = None
    checked = False

    t = 0
    while t_max is None or t < t_max:
        nxt_trees = stepper.step(G, current.assignment, t + 1)
        nxt = _intern_round(nxt_trees, stepper.k, interner, t + 1)
        if nxt.num_classes() == current.num_classes():
            # no class split anywhere: stable; verify, do not store overshoot
            assert equivalent(nxt, current)
            t_inf = t
            checked = True
            break
        colourings.append(nxt)
        current = nxt
        t += 1

    return WlRun(stepper.algorithm, stepper.k, G, colourings, t_inf, checked, interner)


def colour_refinement(G: LabelledGraph, t_max: int | None = None,
                      interner: ColourInterner | None = None) -> WlRun:
    return refine(G, "cr", 1, t_max, interner)


def wl(G, k: int, t_max: int | None = None,
       interner: ColourInterner | None = None, budget: int | None = None) -> WlRun:
    return refine(G, "wl", k, t_max, interner, budget)


def owl(G, k: int, t_max: int | None = None,
        interner: ColourInterner | None = None, budget: int | None = None) -> WlRun:
    return refine(G, "owl", k, t_max, interner, budget)


def pair_run(G, H, algorithm: str = "cr", k: int = 1,
             t_max: int | None = None,
             interner: ColourInterner | None = None,
             budget: int | None = None) -> tuple[WlRun, WlRun]:
    """Run the same algorithm on two graphs in lockstep with shared colours.

    The runs advance until the *joint* partition (over both key sets)
    stops splitting, or until ``t_max``.  Once the joint partition is
    frozen for one round, every later round relabels classes bijectively,
    so all per-round verdicts (vertex-colour equalities, hat-multiset
    equality) are frozen too: the final stored round decides "t = infinity".
    """
    stepper = _stepper(algorithm, k)
    for X in (G, H):
        if X.n < 1:
            raise ValueError("refinement needs nonempty graphs")
        _check_tuple_budget(X.n, stepper.k, budget)
    interner = interner if interner is not None else default_interner()

    trees_g = stepper.initial(G)
    trees_h = stepper.initial(H)
    cur_g = _intern_round(trees_g, stepper.k, interner, 0)
    cur_h = _intern_round(trees_h, stepper.k, interner, 0)
    rounds_g = [cur_g]
    rounds_h = [cur_h]

    def joint_classes(a: Colouring, b: Colouring) -> int:
        return len(set(a.assignment.values()) | set(b.assignment.values()))

    t_inf_g = t_inf_h = None
    t = 0
    while t_max is None or t < t_max:
        nxt_g = _intern_round(stepper.step(G, cur_g.assignment, t + 1),
                              stepper.k, interner, t + 1)
        nxt_h = _intern_round(stepper.step(H, cur_h.assignment, t + 1),
                              stepper.k, interner, t + 1)
        if t_inf_g is None and nxt_g.num_classes() == cur_g.num_classes():
            t_inf_g = t
        if t_inf_h is None and nxt_h.num_classes() == cur_h.num_classes():
            t_inf_h = t
        if joint_classes(nxt_g, nxt_h) == joint_classes(cur_g, cur_h):
            break
        rounds_g.append(nxt_g)
        rounds_h.append(nxt_h)
        cur_g, cur_h = nxt_g, nxt_h
        t += 1

    run_g = WlRun(stepper.algorithm, stepper.k, G, rounds_g, t_inf_g,
                  t_inf_g is not None, interner)
    run_h = WlRun(stepper.algorithm, stepper.k, H, rounds_h, t_inf_h,
                  t_inf_h is not None, interner)
    return run_g, run_h


# ---------------------------------------------------------------------------
# Distinguishability
# ---------------------------------------------------------------------------

def _check_runs(run_a: WlRun, run_b: WlRun, t: int) -> None:
    if run_a.algorithm != run_b.algorithm or run_a.k != run_b.k:
        raise ValueError("runs use different algorithms")
    if run_a.interner is not run_b.interner:
        raise ValueError("runs do not share an interner; colours not comparable")
    for r in (run_a, run_b):
        if t > r.last_round:
            raise IndexError(f"round {t} not computed in run (have 0..{r.last_round})")


def distinguishes_vertices(run_a: WlRun, key_a, run_b: WlRun, key_b, t: int) -> bool:
    """Interned colour inequality of two tuples at round t."""
    _check_runs(run_a, run_b, t)
    return run_a.colour(key_a, t) != run_b.colour(key_b, t)


def distinguishes_graphs(run_a: WlRun, run_b: WlRun, t: int) -> bool:
    """Hat-multiset inequality of the two graphs at round t."""
    _check_runs(run_a, run_b, t)
    return hat_invariant(run_a.colouring_at(t)) != hat_invariant(run_b.colouring_at(t))


def compare_graphs(G, H, algorithm: str = "cr", k: int = 1,
                   t: int | None = None, budget: int | None = None) -> bool:
    """True iff the algorithm distinguishes G and H at round t (None = at
    infinity, i.e. at the joint fixed point)."""
    run_g, run_h = pair_run(G, H, algorithm, k, t_max=t, budget=budget)
    last = min(run_g.last_round, run_h.last_round)
    at = last if t is None else min(t, last)
    return distinguishes_graphs(run_g, run_h, at)


def compare_vertices(G, key_g, H, key_h, algorithm: str = "cr", k: int = 1,
                     t: int | None = None, budget: int | None = None) -> bool:
    run_g, run_h = pair_run(G, H, algorithm, k, t_max=t, budget=budget)
    last = min(run_g.last_round, run_h.last_round)
    at = last if t is None else min(t, last)
    return distinguishes_vertices(run_g, key_g, run_h, key_h, at)


# ---------------------------------------------------------------------------
# The derived structure hosting oblivious k-WL as 1-WL
# ---------------------------------------------------------------------------

MAX_TYPE_RELATIONS = 4096


@dataclass(frozen=True)
class DerivedStructure:
    """The binary structure on V(G)^k whose 1-WL run mirrors oblivious k-WL.

    Vertices are k-tuples in lexicographic order; relation i connects the
    ordered pairs of tuples differing exactly in component i; one unary
    relation per possible atomic type (indexed by the type's bit value)
    marks the tuples of that type.
    """

    structure: BinaryStructure
    tuples: tuple[tuple[int, ...], ...]
    k: int
    source_n: int

    def index(self, vs: tuple[int, ...]) -> int:
        idx = 0
        for v in vs:
            idx = idx * self.source_n + v
        return idx


def derived_structure(G: LabelledGraph, k: int,
                      budget: int | None = None) -> DerivedStructure:
    if k < 1:
        raise ValueError("derived structure needs k >= 1")
    _check_tuple_budget(G.n, k, budget)
    n = G.n
    tuples = list(itertools.product(range(n), repeat=k))
    index = {vs: i for i, vs in enumerate(tuples)}

    relations: list[set[tuple[int, int]]] = [set() for _ in range(k)]
    for vs in tuples:
        i_vs = index[vs]
        for pos in range(k):
            for w in range(n):
                if w == vs[pos]:
                    continue
                other = list(vs)
                other[pos] = w
                relations[pos].add((i_vs, index[tuple(other)]))

    type_len = 2 * (k * (k - 1) // 2) + k * G.num_labels
    if 2**type_len > MAX_TYPE_RELATIONS:
        raise BudgetExceeded(
            f"2^{type_len} atomic-type relations exceed the cap of {MAX_TYPE_RELATIONS}")
    label_rows = [[0] * len(tuples) for _ in range(2**type_len)]
    for vs in tuples:
        bits = atomic_type(G, vs)
        value = 0
        for b in bits:
            value = value * 2 + b
        label_rows[value][index[vs]] = 1

    A = BinaryStructure.make(len(tuples), relations, label_rows)
    return DerivedStructure(A, tuple(tuples), k, n)
