"""Graphs, binary relational structures, atomic types, and generators.

Vertices are dense 0-based integers.  A ``LabelledGraph`` is finite,
undirected, simple (no self-loops), with ``num_labels`` unary label
relations stored as 0/1 bit-vectors of length ``n``.  A
``BinaryStructure`` additionally carries directed binary relations in
which self-loops are permitted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence


def _normalise_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class LabelledGraph:
    """An undirected vertex-labelled graph.

    ``edges`` holds each undirected edge once as an ordered pair (u, v)
    with u < v.  ``labels[i]`` is the bit-vector of the i-th unary label
    relation.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    labels: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be >= 0")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop {u} not allowed")
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range or not normalised")
        for bits in self.labels:
            if len(bits) != self.n:
                raise ValueError("label bit-vector length must equal n")
            if any(b not in (0, 1) for b in bits):
                raise ValueError("label bits must be 0 or 1")

    @classmethod
    def make(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        labels: Sequence[Sequence[int]] = (),
    ) -> "LabelledGraph":
        """Build a graph, normalising edge orientation and rejecting duplicates."""
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            e = _normalise_edge(u, v)
            if e in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add(e)
        return cls(n, frozenset(seen), tuple(tuple(bits) for bits in labels))

    @property
    def num_labels(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(self.n)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def _edge_set(self) -> frozenset[tuple[int, int]]:
        return self.edges

    def neighbours(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return _normalise_edge(u, v) in self._edge_set

    def label_bits(self, v: int) -> tuple[int, ...]:
        """The colour of v: its vector of label-membership bits."""
        return tuple(bits[v] for bits in self.labels)

    def degree_multiset(self) -> tuple[int, ...]:
        return tuple(sorted(self.degree(v) for v in self.vertices))

    def relabel(self, perm: Sequence[int]) -> "LabelledGraph":
        """The image of this graph under the vertex permutation v -> perm[v]."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of the vertices")
        edges = [(perm[u], perm[v]) for u, v in self.edges]
        labels = []
        for bits in self.labels:
            new = [0] * self.n
            for v, b in enumerate(bits):
                new[perm[v]] = b
            labels.append(tuple(new))
        return LabelledGraph.make(self.n, edges, labels)

    def induced_subgraph(self, vertices: Sequence[int]) -> "LabelledGraph":
        """Induced subgraph on the given vertices, renumbered 0..len-1 in order."""
        index = {v: i for i, v in enumerate(vertices)}
        edges = [
            (index[u], index[v])
            for u, v in self.edges
            if u in index and v in index
        ]
        labels = [tuple(bits[v] for v in vertices) for bits in self.labels]
        return LabelledGraph.make(len(vertices), edges, labels)


@dataclass(frozen=True)
class BinaryStructure:
    """A binary relational structure: directed relations plus unary labels.

    Relations are sets of ordered pairs; self-loops are permitted.
    """

    n: int
    relations: tuple[frozenset[tuple[int, int]], ...]
    labels: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        for rel in self.relations:
            for u, v in rel:
                if not (0 <= u < self.n and 0 <= v < self.n):
                    raise ValueError(f"relation pair ({u}, {v}) out of range")
        for bits in self.labels:
            if len(bits) != self.n:
                raise ValueError("label bit-vector length must equal n")

    @classmethod
    def make(
        cls,
        n: int,
        relations: Sequence[Iterable[tuple[int, int]]] = (),
        labels: Sequence[Sequence[int]] = (),
    ) -> "BinaryStructure":
        return cls(
            n,
            tuple(frozenset(tuple(p) for p in rel) for rel in relations),
            tuple(tuple(bits) for bits in labels),
        )

    @property
    def num_relations(self) -> int:
        return len(self.relations)

    @property
    def num_labels(self) -> int:
        return len(self.labels)

    @property
    def vertices(self) -> range:
        return range(self.n)

    @cached_property
    def out_adjacency(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """Per relation i, per vertex v: sorted tuple of w with (v, w) in E_i."""
        table = []
        for rel in self.relations:
            adj: list[list[int]] = [[] for _ in range(self.n)]
            for u, v in rel:
                adj[u].append(v)
            table.append(tuple(tuple(sorted(a)) for a in adj))
        return tuple(table)

    def related(self, i: int, u: int, v: int) -> bool:
        return (u, v) in self.relations[i]

    def label_bits(self, v: int) -> tuple[int, ...]:
        """Diagonal relation bits followed by label bits, per vertex."""
        diag = tuple(1 if (v, v) in rel else 0 for rel in self.relations)
        return diag + tuple(bits[v] for bits in self.labels)

    def relabel(self, perm: Sequence[int]) -> "BinaryStructure":
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of the vertices")
        rels = [
            frozenset((perm[u], perm[v]) for u, v in rel) for rel in self.relations
        ]
        labels = []
        for bits in self.labels:
            new = [0] * self.n
            for v, b in enumerate(bits):
                new[perm[v]] = b
            labels.append(tuple(new))
        return BinaryStructure.make(self.n, rels, labels)


# ---------------------------------------------------------------------------
# Atomic types
# ---------------------------------------------------------------------------

def atomic_type(G: LabelledGraph | BinaryStructure, vs: Sequence[int]) -> tuple[int, ...]:
    """The atomic type of a k-tuple of vertices, as a fixed-layout bit-vector.

    Graphs: for each pair of positions 1 <= i < j <= k (lexicographic) two
    bits, equality then adjacency; then for each position its label bits.
    Total length 2*C(k,2) + k*num_labels.  For k = 1 this is exactly the
    colour (the label bit-vector) of the vertex.

    Structures with m binary relations: for each relation, k*k bits over
    ordered position pairs (row-major); then the C(k,2) equality bits; then
    k*num_labels label bits.
    """
    k = len(vs)
    for v in vs:
        if not (0 <= v < G.n):
            raise ValueError(f"vertex {v} out of range for n={G.n}")
    bits: list[int] = []
    if isinstance(G, LabelledGraph):
        for i in range(k):
            for j in range(i + 1, k):
                bits.append(1 if vs[i] == vs[j] else 0)
                bits.append(1 if G.has_edge(vs[i], vs[j]) else 0)
        for i in range(k):
            bits.extend(G.label_bits(vs[i]))
    else:
        for rel in G.relations:
            for i in range(k):
                for j in range(k):
                    bits.append(1 if (vs[i], vs[j]) in rel else 0)
        for i in range(k):
            for j in range(i + 1, k):
                bits.append(1 if vs[i] == vs[j] else 0)
        for i in range(k):
            bits.extend(tuple(b[vs[i]] for b in G.labels))
    return tuple(bits)


def atomic_type_length(G: LabelledGraph | BinaryStructure, k: int) -> int:
    pairs = k * (k - 1) // 2
    if isinstance(G, LabelledGraph):
        return 2 * pairs + k * G.num_labels
    return G.num_relations * k * k + pairs + k * G.num_labels


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def cycle(n: int) -> LabelledGraph:
    """The cycle C_n (n >= 3)."""
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return LabelledGraph.make(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> LabelledGraph:
    """The complete graph K_n."""
    if n < 1:
        raise ValueError("complete needs n >= 1")
    return LabelledGraph.make(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(n: int) -> LabelledGraph:
    """The star K_{1,n-1}: vertex 0 joined to the other n-1 vertices."""
    if n < 1:
        raise ValueError("star needs n >= 1")
    return LabelledGraph.make(n, [(0, i) for i in range(1, n)])


def empty_graph(n: int, num_labels: int = 0) -> LabelledGraph:
    return LabelledGraph.make(n, [], [(0,) * n for _ in range(num_labels)])


def disjoint_union(G: LabelledGraph, H: LabelledGraph) -> LabelledGraph:
    """G + H with H's vertices shifted by |G|.  Label counts must match."""
    if G.num_labels != H.num_labels:
        raise ValueError("disjoint_union requires equal label counts")
    edges = list(G.edges) + [(u + G.n, v + G.n) for u, v in H.edges]
    labels = [
        tuple(gb) + tuple(hb) for gb, hb in zip(G.labels, H.labels)
    ]
    return LabelledGraph.make(G.n + H.n, edges, labels)


def two_triangles() -> LabelledGraph:
    """The disjoint union of two triangles, 2*K_3."""
    return disjoint_union(complete(3), complete(3))


def gnp(n: int, p: float, seed: int) -> LabelledGraph:
    """An Erdos-Renyi G(n, p) sample, deterministic in the seed."""
    if n < 1:
        raise ValueError("gnp needs n >= 1")
    if not (0.0 <= p <= 1.0):
        raise ValueError("gnp needs 0 <= p <= 1")
    rng = random.Random(seed)
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
    ]
    return LabelledGraph.make(n, edges)


def gnm(n: int, m: int, seed: int) -> LabelledGraph:
    """A uniform random graph with exactly m edges."""
    max_m = n * (n - 1) // 2
    if not (0 <= m <= max_m):
        raise ValueError("edge count out of range")
    rng = random.Random(seed)
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < m:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u != v:
            chosen.add(_normalise_edge(u, v))
    return LabelledGraph.make(n, chosen)


def with_random_labels(G: LabelledGraph, num_labels: int, seed: int) -> LabelledGraph:
    """Attach num_labels independent fair-coin label relations to G."""
    rng = random.Random(seed)
    labels = [
        tuple(rng.randint(0, 1) for _ in range(G.n)) for _ in range(num_labels)
    ]
    return LabelledGraph.make(G.n, G.edges, labels)


def rook4x4() -> LabelledGraph:
    """The 4x4 rook's graph, i.e. the line graph of K_{4,4}.

    Vertices are cells (r, c) of a 4x4 grid, numbered 4*r + c; two cells are
    adjacent iff they share a row or a column.  Strongly regular with
    parameters (16, 6, 2, 2).
    """
    edges = []
    for a in range(16):
        for b in range(a + 1, 16):
            if a // 4 == b // 4 or a % 4 == b % 4:
                edges.append((a, b))
    return LabelledGraph.make(16, edges)


def shrikhande() -> LabelledGraph:
    """The Shrikhande graph.

    Cayley graph of Z4 x Z4 with connection set {+-(1,0), +-(0,1), +-(1,1)};
    vertex (r, c) is numbered 4*r + c.  Strongly regular with parameters
    (16, 6, 2, 2), and not isomorphic to the 4x4 rook's graph.
    """
    deltas = {(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)}
    edges = set()
    for r in range(4):
        for c in range(4):
            for dr, dc in deltas:
                a = 4 * r + c
                b = 4 * ((r + dr) % 4) + ((c + dc) % 4)
                if a != b:
                    edges.add(_normalise_edge(a, b))
    return LabelledGraph.make(16, sorted(edges))


def figure1_pair() -> tuple[LabelledGraph, LabelledGraph]:
    """Two non-isomorphic 6-vertex graphs with degree multiset {2,2,2,2,3,3}.

    The first is triangle-free; the second consists of two triangles joined
    by an edge.  Colour refinement does not separate them (both stabilise
    with the same two classes: degree-2 and degree-3 vertices with identical
    neighbourhood histograms), while the distance invariant does.
    """
    g1 = LabelledGraph.make(6, [(0, 1), (0, 5), (2, 1), (2, 3), (2, 5), (4, 3), (4, 5)])
    g2 = LabelledGraph.make(6, [(0, 1), (0, 5), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4)])
    return g1, g2
