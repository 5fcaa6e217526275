import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wlgnn.colouring import (Colouring, ColourInterner, equivalent,
                             hat_invariant, refines)
from wlgnn.graphs import cycle
from wlgnn.multiset import Multiset
from wlgnn.wl import colour_refinement


def make_colouring(values, interner=None):
    interner = interner or ColourInterner()
    assignment = {v: interner.intern(("c", c)) for v, c in enumerate(values)}
    return Colouring(1, assignment, interner)


def test_interner_bijection():
    it = ColourInterner()
    a = it.intern(("x", 1))
    b = it.intern(("x", 2))
    assert a != b
    assert it.intern(("x", 1)) == a
    assert it.key_of(a) == ("x", 1)
    assert len(it) == 2


def test_equal_trees_equal_ids_across_universes():
    it = ColourInterner()
    chi1 = Colouring(1, {0: it.intern(("t", 0))}, it)
    chi2 = Colouring(1, {5: it.intern(("t", 0))}, it)
    assert chi1.colour(0) == chi2.colour(5)


def test_refines_reflexive():
    chi = make_colouring([0, 1, 0, 2])
    assert refines(chi, chi) and equivalent(chi, chi)


def test_discrete_refines_trivial():
    it = ColourInterner()
    discrete = make_colouring(range(4), it)
    trivial = make_colouring([9, 9, 9, 9], it)
    assert refines(discrete, trivial)
    assert not refines(trivial, discrete)
    assert not equivalent(discrete, trivial)


def test_refinement_of_consecutive_rounds():
    run = colour_refinement(cycle(6))
    for t in range(1, run.last_round + 1):
        assert refines(run.colouring_at(t), run.colouring_at(t - 1))


def test_mismatch_errors():
    a = make_colouring([0, 1])
    b = make_colouring([0, 1, 2])
    with pytest.raises(ValueError):
        refines(a, b)
    c = Colouring(2, {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 0}, ColourInterner())
    with pytest.raises(ValueError):
        refines(a, c)


def test_hat_single_vertex():
    from wlgnn.graphs import LabelledGraph
    run = colour_refinement(LabelledGraph.make(1))
    hat = hat_invariant(run.colouring_at(0))
    assert hat.order == 1 and len(hat.support()) == 1


@given(st.lists(st.integers(0, 3), min_size=1, max_size=12),
       st.lists(st.integers(0, 3), min_size=1, max_size=12),
       st.lists(st.integers(0, 3), min_size=1, max_size=12),
       st.randoms(use_true_random=False))
@settings(max_examples=200, deadline=None)
def test_refines_is_a_preorder(xs, ys, zs, rnd):
    n = min(len(xs), len(ys), len(zs))
    it = ColourInterner()
    a = make_colouring(xs[:n], it)
    b = make_colouring(ys[:n], it)
    c = make_colouring(zs[:n], it)
    assert refines(a, a)
    if refines(a, b) and refines(b, c):
        assert refines(a, c)


@given(st.lists(st.integers(0, 2), min_size=1, max_size=10),
       st.lists(st.integers(0, 2), min_size=1, max_size=10))
@settings(max_examples=200, deadline=None)
def test_equivalent_is_an_equivalence(xs, ys):
    n = min(len(xs), len(ys))
    it = ColourInterner()
    a = make_colouring(xs[:n], it)
    b = make_colouring(ys[:n], it)
    assert equivalent(a, a)
    assert equivalent(a, b) == equivalent(b, a)


def test_multiset_basics():
    m = Multiset([1, 1, 2])
    assert m.order == 3 and m.multiplicity(1) == 2
    assert 1 in m and 3 not in m
    assert m == Multiset.from_counts({1: 2, 2: 1})
    assert m != Multiset([1, 2])
    assert m.as_sorted_tuple() == ((1, 2), (2, 1))
    with pytest.raises(ValueError):
        m.add(5, -1)
