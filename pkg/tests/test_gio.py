import pytest

from wlgnn.gio import GraphParseError, read_graph, write_graph
from wlgnn.graphs import complete, cycle, rook4x4, star, with_random_labels

from conftest import random_graph


def test_read_k2():
    G = read_graph("p graph 2 0\ne 1 2\n")
    assert G.n == 2 and G.num_edges == 1 and G.has_edge(0, 1)


def test_read_single_labelled_vertex():
    G = read_graph("p graph 1 1\nl 1 1\n")
    assert G.n == 1 and G.num_labels == 1
    assert G.label_bits(0) == (1,)


def test_comments_and_blank_lines():
    G = read_graph("c a comment\n\np graph 3 0\nc another\ne 1 2\n")
    assert G.n == 3 and G.num_edges == 1


def test_write_read_identity(rng):
    corpus = [cycle(5), complete(4), star(6), rook4x4(),
              with_random_labels(cycle(7), 2, seed=9)]
    corpus += [random_graph(rng, n_max=12, labels_max=3) for _ in range(20)]
    for G in corpus:
        text = write_graph(G)
        assert read_graph(text) == G
        assert write_graph(read_graph(text)) == text


def test_roundtrip_normalises(rng):
    scrambled = "p graph 3 1\ne 3 1\ne 2 3\nl 2 1\n"
    G = read_graph(scrambled)
    normal = write_graph(G)
    assert normal == "p graph 3 1\ne 1 3\ne 2 3\nl 2 1\n"
    assert write_graph(read_graph(normal)) == normal


@pytest.mark.parametrize("text,fragment", [
    ("p graph 2 0\ne 1 1\n", "self-loop"),
    ("p graph 2 0\ne 1 2\ne 2 1\n", "duplicate"),
    ("p graph 2 0\ne 1 3\n", "out of range"),
    ("e 1 2\n", "before problem line"),
    ("p graph 2 0\nq 1\n", "unknown"),
    ("p graph 2 1\nl 1 2\n", "label index"),
    ("", "missing problem line"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(GraphParseError) as err:
        read_graph(text)
    assert fragment in str(err.value)


def test_parse_error_line_number():
    with pytest.raises(GraphParseError) as err:
        read_graph("p graph 2 0\nc fine\ne 1 1\n")
    assert err.value.line_no == 3
