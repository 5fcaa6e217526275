import random

import pytest

from wlgnn.graphs import (BinaryStructure, LabelledGraph, complete, cycle,
                          star, with_random_labels)
from wlgnn.logic import (And, CountExists, Edge, Formula, FormulaParseError,
                         Label, Not, Or, UnboundVariable, VarEq, all_vars,
                         evaluate, evaluate_unary, exists, forall, formula_size,
                         format_formula, fragment_check, parse_formula,
                         quantifier_rank, top)

from conftest import random_graph, random_permutation

EXAMPLE_AT_MOST_ONE_BUSY_NEIGHBOUR = (
    "(not (existsGE 2 y (and (E x y) (existsGE 11 x (and (E y x) (P 1 x))))))"
)


def busy_neighbour_graph(num_intermediates: int) -> LabelledGraph:
    """Vertex 0 joined to intermediates, each adjacent to 11 labelled leaves."""
    edges = []
    labels = []
    next_v = 1 + num_intermediates
    for i in range(1, 1 + num_intermediates):
        edges.append((0, i))
        for _ in range(11):
            edges.append((i, next_v))
            labels.append(next_v)
            next_v += 1
    bits = [1 if v in labels else 0 for v in range(next_v)]
    return LabelledGraph.make(next_v, edges, [bits])


class TestParse:
    def test_round_trip(self):
        phi = parse_formula(EXAMPLE_AT_MOST_ONE_BUSY_NEIGHBOUR)
        assert parse_formula(format_formula(phi)) == phi

    def test_shapes(self):
        phi = parse_formula("(and (P 1 x) (not (= x y)))")
        assert phi == And((Label(1, "x"), Not(VarEq("x", "y"))))

    def test_sugar(self):
        assert parse_formula("(exists y (E x y))") == CountExists(1, "y", Edge("x", "y"))
        assert parse_formula("(forall y (E x y))") == Not(
            CountExists(1, "y", Not(Edge("x", "y"))))

    @pytest.mark.parametrize("bad", [
        "(existsGE 0 y (E x y))",
        "(unknown x)",
        "(not)",
        "(E x y",
        "x",
    ])
    def test_errors(self, bad):
        with pytest.raises((FormulaParseError, ValueError)):
            parse_formula(bad)


class TestEvaluate:
    def test_min_degree_on_regular(self):
        # "every vertex has at least d neighbours"
        def min_degree(d):
            return forall("x", CountExists(d, "y", Edge("x", "y")))

        assert evaluate(min_degree(2), cycle(6))
        assert not evaluate(min_degree(3), cycle(6))
        assert not evaluate(min_degree(2), star(4))
        assert evaluate(min_degree(1), star(4))

    def test_label_atom(self):
        G = LabelledGraph.make(2, [(0, 1)], [[1, 0]])
        assert evaluate(Label(1, "x"), G, {"x": 0})
        assert not evaluate(Label(1, "x"), G, {"x": 1})

    def test_busy_neighbour_example(self):
        phi = parse_formula(EXAMPLE_AT_MOST_ONE_BUSY_NEIGHBOUR)
        assert evaluate(phi, busy_neighbour_graph(1), {"x": 0})
        assert not evaluate(phi, busy_neighbour_graph(2), {"x": 0})
        # ten labelled leaves instead of eleven: no busy neighbours at all
        G = busy_neighbour_graph(2)
        ten = parse_formula(EXAMPLE_AT_MOST_ONE_BUSY_NEIGHBOUR.replace("11", "12"))
        assert evaluate(ten, G, {"x": 0})

    def test_unbound_variable(self):
        with pytest.raises(UnboundVariable):
            evaluate(Edge("x", "y"), cycle(3), {"x": 0})

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            evaluate(Label(1, "x"), with_random_labels(cycle(3), 1, 0), {"x": 9})

    def test_desugaring_against_direct_counting(self, rng):
        for _ in range(20):
            G = random_graph(rng, n_min=1, n_max=6, labels_max=1)
            body = Edge("x", "y") if rng.random() < 0.5 else Not(Edge("x", "y"))
            ex = exists("y", body)
            fa = forall("y", body)
            for v in G.vertices:
                direct = [evaluate(body, G, {"x": v, "y": w}) for w in G.vertices]
                assert evaluate(ex, G, {"x": v}) == any(direct)
                assert evaluate(fa, G, {"x": v}) == all(direct)

    def test_isomorphism_invariance(self, rng):
        phi = parse_formula(EXAMPLE_AT_MOST_ONE_BUSY_NEIGHBOUR)
        for _ in range(10):
            G = random_graph(rng, n_min=2, n_max=7, labels_max=1)
            if G.num_labels != 1:
                continue
            perm = random_permutation(rng, G.n)
            H = G.relabel(perm)
            for v in G.vertices:
                assert evaluate(phi, G, {"x": v}) == evaluate(phi, H, {"x": perm[v]})

    def test_structure_relations(self):
        A = BinaryStructure.make(3, [[(0, 1), (1, 2)]])
        from wlgnn.logic import Rel
        assert evaluate(Rel(1, "x", "y"), A, {"x": 0, "y": 1})
        assert not evaluate(Rel(1, "x", "y"), A, {"x": 1, "y": 0})
        with pytest.raises(TypeError):
            evaluate(Edge("x", "y"), A, {"x": 0, "y": 1})

    def test_evaluate_unary(self):
        G = star(4)
        truth = evaluate_unary(CountExists(3, "y", Edge("x", "y")), G)
        assert truth == [True, False, False, False]


class TestFragment:
    def test_busy_neighbour_fragment(self):
        report = fragment_check(parse_formula(EXAMPLE_AT_MOST_ONE_BUSY_NEIGHBOUR))
        assert report.variable_count == 2
        assert report.quantifier_rank == 2
        assert report.is_guarded and report.guard_violation is None

    def test_unguarded_quantifier(self):
        report = fragment_check(parse_formula("(existsGE 1 y (P 1 y))"))
        assert not report.is_guarded
        assert "guard" in report.guard_violation

    def test_body_with_foreign_free_variable(self):
        # body mentions x besides the quantified y: not a unary operation
        phi = parse_formula("(existsGE 1 y (and (E x y) (= x y)))")
        assert not fragment_check(phi).is_guarded

    def test_guard_orientation_symmetric(self):
        inner = parse_formula("(existsGE 11 x (and (E y x) (P 1 x)))")
        assert fragment_check(inner).is_guarded

    def test_distance_doubling_uses_three_variables(self):
        two = "(exists y (and (E x y) (E y z)))"
        four = f"(exists z (and {two} (exists x (and (E z x) (E x y)))))"
        # free variables x, y; bound reuse of all three names
        phi = parse_formula(four)
        assert len(all_vars(phi)) == 3
        assert quantifier_rank(phi) == 2

    def test_rank_rules(self):
        atom = Label(1, "x")
        assert quantifier_rank(atom) == 0
        assert quantifier_rank(Not(atom)) == 0
        q = CountExists(2, "y", And((Edge("x", "y"), atom)))
        assert quantifier_rank(q) == 1
        assert quantifier_rank(And((q, atom))) == 1
        assert quantifier_rank(CountExists(1, "x", q)) == 2

    def test_top_is_guarded_inside_degree_formula(self):
        phi = CountExists(2, "y", And((Edge("x", "y"), top("y"))))
        assert fragment_check(phi).is_guarded

    def test_formula_size(self):
        assert formula_size(parse_formula("(and (P 1 x) (P 1 x))")) == 3
