import random

import pytest

from wlgnn.graphs import LabelledGraph, gnp, with_random_labels


def random_graph(rng: random.Random, n_min=1, n_max=8, labels_max=0) -> LabelledGraph:
    n = rng.randint(n_min, n_max)
    p = rng.choice([0.2, 0.5, 0.8])
    G = gnp(n, p, rng.randrange(2**31))
    if labels_max:
        num_labels = rng.randint(0, labels_max)
        if num_labels:
            G = with_random_labels(G, num_labels, rng.randrange(2**31))
    return G


def random_regular_pair(rng: random.Random):
    """Two regular graphs of the same order and degree (may coincide)."""
    from wlgnn.graphs import complete, cycle, disjoint_union
    choices = [
        (cycle(6), disjoint_union(cycle(3), cycle(3))),
        (cycle(8), disjoint_union(cycle(4), cycle(4))),
        (complete(4), complete(4)),
        (cycle(5), cycle(5)),
    ]
    return rng.choice(choices)


def random_permutation(rng: random.Random, n: int) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
