"""Brute-force isomorphism testing for small graphs.

Backtracking over a greedy vertex order with bitmask adjacency checks;
candidate images are pre-pruned by degree, labels, and canonical stable
colours (sound, since all three are isomorphism-invariant).  Exact and
complete up to the size cap.
"""

from __future__ import annotations

from collections import Counter
from typing import Sequence

from .graphs import LabelledGraph
from .wl import pair_run

ISO_SIZE_CAP = 16


class SizeCapExceeded(RuntimeError):
    pass


def is_isomorphism(G: LabelledGraph, H: LabelledGraph, perm: Sequence[int]) -> bool:
    """Check that v -> perm[v] preserves edges, non-edges, and labels."""
    if G.n != H.n or sorted(perm) != list(range(G.n)):
        return False
    for v in range(G.n):
        if G.label_bits(v) != H.label_bits(perm[v]):
            return False
    for u in range(G.n):
        for v in range(u + 1, G.n):
            if G.has_edge(u, v) != H.has_edge(perm[u], perm[v]):
                return False
    return True


def _greedy_order(G: LabelledGraph) -> list[int]:
    """Order vertices so each one has many neighbours among its
    predecessors (fails fast during backtracking)."""
    order: list[int] = []
    placed: set[int] = set()
    while len(order) < G.n:
        best = None
        best_key = None
        for v in range(G.n):
            if v in placed:
                continue
            back = sum(1 for w in G.neighbours(v) if w in placed)
            key = (back, G.degree(v))
            if best_key is None or key > best_key:
                best, best_key = v, key
        order.append(best)
        placed.add(best)
    return order


def _candidates(G: LabelledGraph, H: LabelledGraph) -> list[set[int]] | None:
    """Per G-vertex admissible images in H, pruned by stable colours."""
    run_g, run_h = pair_run(G, H, "cr")
    t = min(run_g.last_round, run_h.last_round)
    cand = []
    for v in range(G.n):
        cv = run_g.colour(v, t)
        images = {w for w in range(H.n) if run_h.colour(w, t) == cv}
        if not images:
            return None
        cand.append(images)
    return cand


def oracle_isomorphic(G: LabelledGraph, H: LabelledGraph
                      ) -> tuple[bool, list[int] | None]:
    """Decide isomorphism exactly; on success also return a witness."""
    if max(G.n, H.n) > ISO_SIZE_CAP:
        raise SizeCapExceeded(f"isomorphism oracle capped at {ISO_SIZE_CAP} vertices")
    if G.n != H.n or G.num_edges != H.num_edges or G.num_labels != H.num_labels:
        return False, None
    if G.degree_multiset() != H.degree_multiset():
        return False, None
    if (Counter(G.label_bits(v) for v in range(G.n))
            != Counter(H.label_bits(v) for v in range(H.n))):
        return False, None
    if G.n == 0:
        return True, []

    cand = _candidates(G, H)
    if cand is None:
        return False, None

    order = _greedy_order(G)
    adj_h = [0] * H.n
    for u, v in H.edges:
        adj_h[u] |= 1 << v
        adj_h[v] |= 1 << u
    prefix_nbrs = []
    pos_of = {v: i for i, v in enumerate(order)}
    for d, v in enumerate(order):
        prefix_nbrs.append([pos_of[w] for w in G.neighbours(v) if pos_of[w] < d])

    image = [0] * G.n  # by depth
    used = 0

    def dfs(depth: int) -> bool:
        nonlocal used
        if depth == G.n:
            return True
        v = order[depth]
        req = 0
        for p in prefix_nbrs[depth]:
            req |= 1 << image[p]
        for w in cand[v]:
            bit = 1 << w
            if used & bit:
                continue
            if (adj_h[w] & used) != req:
                continue
            image[depth] = w
            used |= bit
            if dfs(depth + 1):
                return True
            used &= ~bit
        return False

    if dfs(0):
        perm = [0] * G.n
        for d, v in enumerate(order):
            perm[v] = image[d]
        assert is_isomorphism(G, H, perm)
        return True, perm
    return False, None


def automorphism_orbits(G: LabelledGraph, size_cap: int = 8) -> list[set[int]]:
    """Vertex orbits under the full automorphism group (exhaustive search)."""
    if G.n > size_cap:
        raise SizeCapExceeded(f"orbit computation capped at {size_cap} vertices")
    if G.n == 0:
        return []
    parent = list(range(G.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    cand = _candidates(G, G)
    assert cand is not None
    order = _greedy_order(G)
    adj = [0] * G.n
    for u, v in G.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    pos_of = {v: i for i, v in enumerate(order)}
    prefix_nbrs = [
        [pos_of[w] for w in G.neighbours(v) if pos_of[w] < d]
        for d, v in enumerate(order)
    ]
    image = [0] * G.n
    used = 0

    def dfs(depth: int) -> None:
        nonlocal used
        if depth == G.n:
            for d, v in enumerate(order):
                union(v, image[d])
            return
        v = order[depth]
        req = 0
        for p in prefix_nbrs[depth]:
            req |= 1 << image[p]
        for w in cand[v]:
            bit = 1 << w
            if used & bit or (adj[w] & used) != req:
                continue
            if G.label_bits(v) != G.label_bits(w):
                continue
            image[depth] = w
            used |= bit
            dfs(depth + 1)
            used &= ~bit

    dfs(0)
    orbits: dict[int, set[int]] = {}
    for v in range(G.n):
        orbits.setdefault(find(v), set()).add(v)
    return list(orbits.values())
