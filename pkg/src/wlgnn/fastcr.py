"""Fast colour refinement via worklist partition refinement.

Computes the *partition* of the stable colouring (not the colour trees):
the coarsest equitable partition refining the label partition.  The
worklist scheme re-counts neighbours only against splitter classes and
keeps the largest fragment of every split out of the queue, giving the
usual O((n + m) log n) behaviour.

Cross-graph comparison at this level is done by refining the disjoint
union jointly, which is sound for colour refinement because it only
counts neighbours.  (It would *not* be sound for 1-WL, which also counts
non-neighbours; 1-WL comparisons always go through canonical colour
trees in :mod:`wlgnn.wl`.)
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass

from .graphs import LabelledGraph, disjoint_union


@dataclass
class FastPartition:
    """A stable partition: dense class labels per vertex."""

    labels: list[int]
    num_classes: int

    def classes(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v, c in enumerate(self.labels):
            out.setdefault(c, []).append(v)
        return out

    def class_sizes(self) -> tuple[int, ...]:
        return tuple(sorted(len(c) for c in self.classes().values()))


def colour_refinement_fast(G: LabelledGraph) -> FastPartition:
    """Stable colour-refinement partition of G."""
    n = G.n
    if n == 0:
        return FastPartition([], 0)
    adj = G.adjacency

    # initial partition by label bit-vector, ids in first-occurrence order
    init_ids: dict[tuple[int, ...], int] = {}
    class_of = [0] * n
    members: list[set[int]] = []
    for v in range(n):
        bits = G.label_bits(v)
        c = init_ids.get(bits)
        if c is None:
            c = len(init_ids)
            init_ids[bits] = c
            members.append(set())
        class_of[v] = c
        members[c].add(v)

    queue: deque[int] = deque(range(len(members)))

    while queue:
        s = queue.popleft()

        cnt: Counter = Counter()
        update = cnt.update
        for x in members[s]:
            update(adj[x])

        # bucket counted vertices by (class, count); singletons cannot split
        buckets: dict[int, dict[int, list[int]]] = {}
        for w, k in cnt.items():
            c = class_of[w]
            if len(members[c]) > 1:
                by_count = buckets.get(c)
                if by_count is None:
                    buckets[c] = {k: [w]}
                else:
                    g = by_count.get(k)
                    if g is None:
                        by_count[k] = [w]
                    else:
                        g.append(w)

        for c, by_count in buckets.items():
            cls = members[c]
            touched = sum(len(g) for g in by_count.values())
            if touched == len(cls) and len(by_count) == 1:
                continue
            groups = [set(g) for g in by_count.values()]
            if touched < len(cls):
                zero = cls.difference(*groups)
                groups.append(zero)
            # the largest fragment keeps the old id (and its queue status)
            groups.sort(key=len)
            members[c] = groups.pop()
            for frag in groups:
                new_id = len(members)
                members.append(frag)
                for v in frag:
                    class_of[v] = new_id
                queue.append(new_id)

    # dense relabel in first-occurrence order for determinism
    remap: dict[int, int] = {}
    labels = []
    for v in range(n):
        c = class_of[v]
        d = remap.get(c)
        if d is None:
            d = len(remap)
            remap[c] = d
        labels.append(d)
    return FastPartition(labels, len(remap))


def colour_refinement_fast_pair(G: LabelledGraph, H: LabelledGraph
                                ) -> tuple[FastPartition, FastPartition, bool]:
    """Joint refinement of G and H on their disjoint union.

    Returns the two restricted partitions with *shared* class ids, plus
    the verdict "distinguished at infinity" (class-census inequality).
    """
    union = disjoint_union(G, H)
    part = colour_refinement_fast(union)
    left = part.labels[:G.n]
    right = part.labels[G.n:]
    distinguished = Counter(left) != Counter(right)
    return (FastPartition(left, len(set(left))),
            FastPartition(right, len(set(right))),
            distinguished)
