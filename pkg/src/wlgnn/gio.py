"""Text format for labelled graphs.

DIMACS-adjacent, diff-friendly, UTF-8 with LF line endings:

    c optional comment lines
    p graph <n> <num_labels>
    e <u> <v>          edge, 1-based vertex ids, each edge listed once
    l <v> <i>          vertex v carries label i (1-based label index)

Edges are undirected; duplicates (in either orientation) and self-loops
are rejected.  ``write_graph(read_graph(s))`` normalises ``s`` (sorted
edge and label lines) without renaming vertices.
"""

from __future__ import annotations

from .graphs import LabelledGraph


class GraphParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def read_graph(text: str) -> LabelledGraph:
    n = None
    num_labels = 0
    edges: set[tuple[int, int]] = set()
    label_sets: list[set[int]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "p":
            if n is not None:
                raise GraphParseError(line_no, "duplicate problem line")
            if len(parts) != 4 or parts[1] != "graph":
                raise GraphParseError(line_no, "expected 'p graph <n> <labels>'")
            try:
                n = int(parts[2])
                num_labels = int(parts[3])
            except ValueError:
                raise GraphParseError(line_no, "non-integer counts") from None
            if n < 0 or num_labels < 0:
                raise GraphParseError(line_no, "counts must be >= 0")
            label_sets = [set() for _ in range(num_labels)]
        elif kind == "e":
            if n is None:
                raise GraphParseError(line_no, "edge before problem line")
            if len(parts) != 3:
                raise GraphParseError(line_no, "expected 'e <u> <v>'")
            try:
                u, v = int(parts[1]) - 1, int(parts[2]) - 1
            except ValueError:
                raise GraphParseError(line_no, "non-integer vertex id") from None
            if not (0 <= u < n and 0 <= v < n):
                raise GraphParseError(line_no, "vertex id out of range")
            if u == v:
                raise GraphParseError(line_no, "self-loop not allowed")
            e = (u, v) if u < v else (v, u)
            if e in edges:
                raise GraphParseError(line_no, "duplicate edge")
            edges.add(e)
        elif kind == "l":
            if n is None:
                raise GraphParseError(line_no, "label before problem line")
            if len(parts) != 3:
                raise GraphParseError(line_no, "expected 'l <v> <i>'")
            try:
                v, i = int(parts[1]) - 1, int(parts[2]) - 1
            except ValueError:
                raise GraphParseError(line_no, "non-integer field") from None
            if not (0 <= v < n):
                raise GraphParseError(line_no, "vertex id out of range")
            if not (0 <= i < num_labels):
                raise GraphParseError(line_no, "label index out of range")
            label_sets[i].add(v)
        else:
            raise GraphParseError(line_no, f"unknown line kind {kind!r}")

    if n is None:
        raise GraphParseError(0, "missing problem line")
    labels = [
        tuple(1 if v in s else 0 for v in range(n)) for s in label_sets
    ]
    return LabelledGraph.make(n, edges, labels)


def write_graph(G: LabelledGraph) -> str:
    lines = [f"p graph {G.n} {G.num_labels}"]
    for u, v in sorted(G.edges):
        lines.append(f"e {u + 1} {v + 1}")
    for i, bits in enumerate(G.labels):
        for v, b in enumerate(bits):
            if b:
                lines.append(f"l {v + 1} {i + 1}")
    return "\n".join(lines) + "\n"


def load_graph(path: str) -> LabelledGraph:
    with open(path, "r", encoding="utf-8") as f:
        return read_graph(f.read())


def save_graph(G: LabelledGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(write_graph(G))
