import itertools
import random

import pytest

from wlgnn.graphs import (LabelledGraph, complete, cycle, disjoint_union,
                          rook4x4, shrikhande, star, two_triangles,
                          with_random_labels)
from wlgnn.oracles import (SizeCapExceeded, automorphism_orbits,
                           is_isomorphism, oracle_isomorphic)

from conftest import random_graph, random_permutation


def brute_force_isomorphic(G, H):
    """Reference oracle: try every permutation (n <= 7)."""
    if G.n != H.n:
        return False
    for perm in itertools.permutations(range(G.n)):
        if is_isomorphism(G, H, list(perm)):
            return True
    return False


def test_permuted_graph_has_witness(rng):
    for _ in range(25):
        G = random_graph(rng, n_min=1, n_max=8, labels_max=1)
        perm = random_permutation(rng, G.n)
        ok, witness = oracle_isomorphic(G, G.relabel(perm))
        assert ok and witness is not None
        assert is_isomorphism(G, G.relabel(perm), witness)


def test_connectivity_mismatch():
    assert oracle_isomorphic(cycle(6), two_triangles()) == (False, None)


def test_srg_pair_not_isomorphic():
    assert oracle_isomorphic(rook4x4(), shrikhande())[0] is False


def test_labels_matter():
    G = with_random_labels(cycle(5), 1, seed=1)
    H = LabelledGraph.make(5, G.edges, [(0, 0, 0, 0, 0)])
    assert oracle_isomorphic(G, G)[0] is True
    if any(G.labels[0]):
        assert oracle_isomorphic(G, H)[0] is False


def test_agreement_with_permutation_search(rng):
    for _ in range(40):
        G = random_graph(rng, n_min=1, n_max=6, labels_max=1)
        H = random_graph(rng, n_min=1, n_max=6, labels_max=1)
        if G.num_labels != H.num_labels:
            continue
        assert oracle_isomorphic(G, H)[0] == brute_force_isomorphic(G, H)


def test_size_cap():
    big = LabelledGraph.make(17)
    with pytest.raises(SizeCapExceeded):
        oracle_isomorphic(big, big)


def test_orbits_of_star():
    orbits = automorphism_orbits(star(5))
    assert sorted(len(o) for o in orbits) == [1, 4]


def test_orbits_of_cycle():
    orbits = automorphism_orbits(cycle(6))
    assert len(orbits) == 1


def test_orbits_respect_labels():
    G = LabelledGraph.make(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [[1, 0, 1, 0]])
    orbits = automorphism_orbits(G)
    assert {frozenset(o) for o in orbits} == {frozenset({0, 2}), frozenset({1, 3})}


def test_orbit_members_share_synthesised_colours(rng):
    # vertices in one orbit are never distinguished by refinement
    from wlgnn.synth import synthesize_distinguishing_formula
    for _ in range(10):
        G = random_graph(rng, n_min=2, n_max=6)
        for orbit in automorphism_orbits(G):
            orbit = sorted(orbit)
            for v in orbit[1:]:
                assert synthesize_distinguishing_formula(G, orbit[0], G, v, 3) is None
