import itertools
import random

import pytest

from wlgnn.graphs import (BinaryStructure, LabelledGraph, atomic_type,
                          atomic_type_length, complete, cycle, disjoint_union,
                          figure1_pair, gnp, rook4x4, shrikhande, star,
                          two_triangles, with_random_labels)
from wlgnn.oracles import oracle_isomorphic

from conftest import random_graph, random_permutation


def srg_parameters(G):
    """Brute-force common-neighbour counts over adjacent / non-adjacent pairs."""
    lam, mu = set(), set()
    for u in range(G.n):
        for v in range(u + 1, G.n):
            common = len(set(G.neighbours(u)) & set(G.neighbours(v)))
            (lam if G.has_edge(u, v) else mu).add(common)
    return lam, mu


class TestGenerators:
    def test_cycle6(self):
        G = cycle(6)
        assert G.n == 6 and G.num_edges == 6
        assert all(G.degree(v) == 2 for v in G.vertices)

    def test_star_splits_center(self):
        G = star(4)
        assert G.degree(0) == 3
        assert [G.degree(v) for v in range(1, 4)] == [1, 1, 1]

    def test_complete(self):
        G = complete(5)
        assert G.num_edges == 10

    def test_disjoint_union(self):
        G = disjoint_union(cycle(3), star(4))
        assert G.n == 7 and G.num_edges == 6
        assert two_triangles().degree_multiset() == (2,) * 6

    def test_srg_pair(self):
        rook, shri = rook4x4(), shrikhande()
        for G in (rook, shri):
            assert G.n == 16 and G.num_edges == 48
            assert all(G.degree(v) == 6 for v in G.vertices)
            assert srg_parameters(G) == ({2}, {2})
        assert oracle_isomorphic(rook, shri)[0] is False

    def test_figure1_pair_degrees(self):
        g1, g2 = figure1_pair()
        assert g1.degree_multiset() == (2, 2, 2, 2, 3, 3)
        assert g2.degree_multiset() == (2, 2, 2, 2, 3, 3)
        assert oracle_isomorphic(g1, g2)[0] is False

    def test_gnp_deterministic(self):
        assert gnp(20, 0.4, 7).edges == gnp(20, 0.4, 7).edges
        assert gnp(20, 0.4, 7).edges != gnp(20, 0.4, 8).edges

    def test_generator_invariants(self, rng):
        graphs = [cycle(5), complete(4), star(6), rook4x4(), shrikhande(),
                  two_triangles()] + [random_graph(rng, labels_max=2) for _ in range(20)]
        for G in graphs:
            for u, v in G.edges:
                assert u < v  # stored once, no self-loops
                assert v in G.neighbours(u) and u in G.neighbours(v)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            cycle(2)
        with pytest.raises(ValueError):
            gnp(5, 1.5, 0)
        with pytest.raises(ValueError):
            LabelledGraph.make(3, [(0, 0)])
        with pytest.raises(ValueError):
            LabelledGraph.make(3, [(0, 1), (1, 0)])


class TestAtomicTypes:
    def test_unary_unlabelled_is_empty(self):
        G = cycle(5)
        assert atomic_type(G, (0,)) == ()

    def test_unary_equals_label_bits(self):
        G = with_random_labels(cycle(5), 2, seed=3)
        for v in G.vertices:
            assert atomic_type(G, (v,)) == G.label_bits(v)

    def test_diagonal_pair(self):
        G = complete(3)
        assert atomic_type(G, (1, 1)) == (1, 0)

    def test_single_edge(self):
        G = complete(2)
        assert atomic_type(G, (0, 1)) == (0, 1)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            atomic_type(cycle(3), (0, 5))

    def test_lengths(self, rng):
        G = with_random_labels(cycle(5), 2, seed=1)
        for k in (1, 2, 3):
            vs = tuple(rng.randrange(G.n) for _ in range(k))
            assert len(atomic_type(G, vs)) == atomic_type_length(G, k)

    def test_isomorphism_invariance(self, rng):
        for _ in range(50):
            G = random_graph(rng, n_min=2, labels_max=2)
            perm = random_permutation(rng, G.n)
            H = G.relabel(perm)
            k = rng.randint(1, 3)
            vs = tuple(rng.randrange(G.n) for _ in range(k))
            ws = tuple(perm[v] for v in vs)
            assert atomic_type(G, vs) == atomic_type(H, ws)

    def test_structure_layout(self):
        A = BinaryStructure.make(3, [[(0, 1), (1, 1)]], [[1, 0, 0]])
        # relation block (k*k), equality block, label block
        assert atomic_type(A, (0, 1)) == (0, 1, 0, 1) + (0,) + (1, 0)
        assert atomic_type_length(A, 2) == 4 + 1 + 2

    def test_diagonal_bits_in_structure_colour(self):
        A = BinaryStructure.make(2, [[(0, 0)], [(1, 0)]], [[0, 1]])
        assert A.label_bits(0) == (1, 0, 0)
        assert A.label_bits(1) == (0, 0, 1)


def tuple_induced_isomorphism(G, vs, H, ws):
    """Oracle: does v_i -> w_i define an isomorphism of the induced
    subgraphs on the entry sets?"""
    mapping = {}
    for v, w in zip(vs, ws):
        if mapping.get(v, w) != w:
            return False
        mapping[v] = w
    if len(set(mapping.values())) != len(mapping):
        return False
    for u, v in itertools.combinations(mapping, 2):
        if G.has_edge(u, v) != H.has_edge(mapping[u], mapping[v]):
            return False
    return all(G.label_bits(v) == H.label_bits(mapping[v]) for v in mapping)


class TestAtomicTypeCharacterisation:
    def test_exhaustive_small(self, rng):
        for _ in range(8):
            G = random_graph(rng, n_min=2, n_max=5, labels_max=1)
            H = random_graph(rng, n_min=2, n_max=5, labels_max=1)
            if G.num_labels != H.num_labels:
                continue
            for k in (1, 2):
                for vs in itertools.product(G.vertices, repeat=k):
                    for ws in itertools.product(H.vertices, repeat=k):
                        same = atomic_type(G, vs) == atomic_type(H, ws)
                        assert same == tuple_induced_isomorphism(G, vs, H, ws)

    def test_sampled_k34(self, rng):
        for _ in range(6):
            G = random_graph(rng, n_min=3, n_max=8)
            H = random_graph(rng, n_min=3, n_max=8)
            for k in (3, 4):
                for _ in range(200):
                    vs = tuple(rng.randrange(G.n) for _ in range(k))
                    ws = tuple(rng.randrange(H.n) for _ in range(k))
                    same = atomic_type(G, vs) == atomic_type(H, ws)
                    assert same == tuple_induced_isomorphism(G, vs, H, ws)
