import random
import time

import pytest

from wlgnn.fastcr import colour_refinement_fast, colour_refinement_fast_pair
from wlgnn.graphs import (complete, cycle, disjoint_union, gnm, gnp, star,
                          two_triangles, with_random_labels)
from wlgnn.wl import colour_refinement, compare_graphs

from conftest import random_graph


def partitions_equal(fast, run):
    """Compare the fast partition with a naive run's stable partition."""
    stable = run.stable_colouring()
    by_fast = {}
    by_naive = {}
    for v, c in enumerate(fast.labels):
        by_fast.setdefault(c, set()).add(v)
    for v in stable.keys():
        by_naive.setdefault(stable.colour(v), set()).add(v)
    return set(map(frozenset, by_fast.values())) == set(map(frozenset, by_naive.values()))


def test_complete_graph_single_class():
    part = colour_refinement_fast(complete(7))
    assert part.num_classes == 1


def test_star_two_classes():
    part = colour_refinement_fast(star(5))
    assert part.num_classes == 2
    assert part.labels[0] != part.labels[1]
    assert len(set(part.labels[1:])) == 1


def test_labels_respected():
    G = with_random_labels(cycle(6), 1, seed=4)
    part = colour_refinement_fast(G)
    run = colour_refinement(G)
    assert partitions_equal(part, run)


def test_agreement_with_naive_on_random_graphs():
    rng = random.Random(20240817)
    for i in range(500):
        n = rng.randint(1, 64)
        G = gnp(n, rng.choice([0.05, 0.2, 0.5, 0.8]), rng.randrange(2**31))
        if rng.random() < 0.3:
            G = with_random_labels(G, rng.randint(1, 2), rng.randrange(2**31))
        assert partitions_equal(colour_refinement_fast(G), colour_refinement(G)), i


def test_agreement_on_paths_and_unions(rng):
    # long paths force many refinement rounds
    from wlgnn.graphs import LabelledGraph
    path = LabelledGraph.make(40, [(i, i + 1) for i in range(39)])
    assert partitions_equal(colour_refinement_fast(path), colour_refinement(path))
    G = disjoint_union(path, cycle(11))
    assert partitions_equal(colour_refinement_fast(G), colour_refinement(G))


def test_pair_verdict_matches_engine(rng):
    for _ in range(40):
        G = random_graph(rng, n_min=2, n_max=7)
        H = random_graph(rng, n_min=2, n_max=7)
        _, _, distinguished = colour_refinement_fast_pair(G, H)
        assert distinguished == compare_graphs(G, H, "cr")


def test_pair_on_refinement_blind_pairs():
    _, _, d1 = colour_refinement_fast_pair(cycle(6), two_triangles())
    assert not d1
    _, _, d2 = colour_refinement_fast_pair(cycle(6), cycle(6))
    assert not d2


@pytest.mark.slow
def test_large_random_graph_under_five_seconds():
    G = gnm(100_000, 500_000, seed=99)
    start = time.perf_counter()
    part = colour_refinement_fast(G)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    assert 1 <= part.num_classes <= G.n
    # induced-subgraph spot check against the naive engine
    sub = G.induced_subgraph(list(range(1000)))
    assert partitions_equal(colour_refinement_fast(sub), colour_refinement(sub))
