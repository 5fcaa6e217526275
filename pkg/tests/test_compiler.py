import random
from fractions import Fraction

import pytest

from wlgnn.compiler import (CompileError, PCount, PLabel, PNot, certify,
                            compile_formula, plan, plan_formula)
from wlgnn.gnn import AffineStage, run
from wlgnn.graphs import (LabelledGraph, complete, cycle, star,
                          with_random_labels)
from wlgnn.logic import evaluate, evaluate_unary, parse_formula

from conftest import random_graph
from test_logic import EXAMPLE_AT_MOST_ONE_BUSY_NEIGHBOUR, busy_neighbour_graph


def compiled_verdicts(compiled, G):
    return [out[0] for out in run(compiled.model, G).per_vertex]


def labelled_corpus(rng, count, num_labels, n_max=9):
    out = []
    while len(out) < count:
        G = random_graph(rng, n_min=1, n_max=n_max)
        out.append(with_random_labels(G, num_labels, rng.randrange(2**31)))
    return out


class TestPlan:
    def test_label_atom_alone(self):
        p = plan(parse_formula("(P 1 x)"), num_labels=1)
        assert p.ops == (PLabel(1),)
        assert p.depth == 0 and p.root == 0

    def test_busy_neighbour_plan(self):
        p = plan(parse_formula(EXAMPLE_AT_MOST_ONE_BUSY_NEIGHBOUR), num_labels=1)
        # label atom + inner count + outer count + negation
        assert len(p.ops) == 4 and p.depth == 3
        assert isinstance(p.ops[1], PCount) and p.ops[1].threshold == 11
        assert isinstance(p.ops[2], PCount) and p.ops[2].threshold == 2
        assert p.ops[3] == PNot(2) and p.root == 3

    def test_shared_subformula_deduplicated(self):
        phi = parse_formula("(and (existsGE 2 y (and (E x y) (P 1 y)))"
                            " (not (existsGE 2 y (and (E x y) (P 1 y)))))")
        p = plan(phi, num_labels=1)
        counts = [op for op in p.ops if isinstance(op, PCount)]
        assert len(counts) == 1

    def test_variable_renaming_deduplicates(self):
        # the same unary operation quantified through x and through y
        phi = parse_formula("(and (existsGE 1 y (and (E x y) (P 1 y)))"
                            " (not (not (existsGE 1 y (and (E x y) (P 1 y))))))")
        p = plan(phi, num_labels=1)
        assert len([op for op in p.ops if isinstance(op, PCount)]) == 1

    def test_rejects_unguarded(self):
        with pytest.raises(CompileError) as err:
            plan(parse_formula("(existsGE 1 y (P 1 y))"), 1)
        assert "guard" in str(err.value)

    def test_rejects_three_variables(self):
        phi = parse_formula("(exists y (and (E x y) (exists z (and (E y z) (P 1 z)))))")
        with pytest.raises(CompileError):
            plan(phi, 1)

    def test_rejects_free_edge(self):
        with pytest.raises(CompileError):
            plan(parse_formula("(existsGE 1 y (and (E x y) (E y y)))"), 0)

    def test_plan_formula_round_trip(self, rng):
        phi = parse_formula(EXAMPLE_AT_MOST_ONE_BUSY_NEIGHBOUR)
        p = plan(phi, num_labels=1)
        G = busy_neighbour_graph(2)
        assert (evaluate_unary(plan_formula(p, p.root), G)
                == evaluate_unary(phi, G))


class TestGateArithmetic:
    def test_threshold_eleven_gate(self):
        # the counting gate fires exactly at the threshold
        compiled = compile_formula(
            parse_formula("(existsGE 11 y (and (E x y) (P 1 y)))"), 1)
        stage = compiled.model.layers[0].comb.stages[0]
        assert isinstance(stage, AffineStage)
        gate_bias = stage.bias[-1]
        assert gate_bias == -10
        gate_row = stage.matrix[-1]
        assert gate_row == (0, 1)  # reads the neighbour-sum block, channel 0
        for count, expected in ((12, 1), (11, 1), (10, 0), (0, 0)):
            out = compiled.model.layers[0].comb.apply((0, count), "rational")
            assert out[-1] == expected

    def test_boolean_gates_on_bits(self):
        land = compile_formula(parse_formula("(and (P 1 x) (P 2 x))"), 2)
        lor = compile_formula(parse_formula("(or (P 1 x) (P 2 x))"), 2)
        lnot = compile_formula(parse_formula("(not (P 1 x))"), 2)
        for b1 in (0, 1):
            for b2 in (0, 1):
                G = LabelledGraph.make(1, [], [[b1], [b2]])
                assert compiled_verdicts(land, G) == [b1 & b2]
                assert compiled_verdicts(lor, G) == [b1 | b2]
                assert compiled_verdicts(lnot, G) == [1 - b1]


class TestCompile:
    def test_label_atom_zero_layers(self):
        compiled = compile_formula(parse_formula("(P 1 x)"), 1)
        assert compiled.model.layers == ()
        G = LabelledGraph.make(3, [(0, 1)], [[1, 0, 1]])
        assert compiled_verdicts(compiled, G) == [1, 0, 1]

    def test_busy_neighbour_agreement(self, rng):
        phi = parse_formula(EXAMPLE_AT_MOST_ONE_BUSY_NEIGHBOUR)
        compiled = compile_formula(phi, 1)
        corpus = [busy_neighbour_graph(1), busy_neighbour_graph(2),
                  busy_neighbour_graph(3)]
        corpus += labelled_corpus(rng, 20, 1)
        for G in corpus:
            want = [1 if t else 0 for t in evaluate_unary(phi, G)]
            assert compiled_verdicts(compiled, G) == want

    def test_outputs_are_exact_bits(self, rng):
        phi = parse_formula("(existsGE 2 y (and (E x y) (or (P 1 y) (not (P 2 y)))))")
        compiled = compile_formula(phi, 2)
        for G in labelled_corpus(rng, 10, 2):
            for out in run(compiled.model, G).per_vertex:
                assert out[0] == 0 or out[0] == 1
                assert isinstance(out[0], int) or out[0].denominator == 1

    def test_uniform_across_sizes(self):
        phi = parse_formula("(existsGE 3 y (and (E x y) (= y y)))")
        compiled = compile_formula(phi, 0)
        for n in (2, 5, 16, 48, 64):
            G = star(n)
            want = [1 if t else 0 for t in evaluate_unary(phi, G)]
            assert compiled_verdicts(compiled, G) == want

    def test_degree_formula_without_labels(self):
        compiled = compile_formula(parse_formula("(existsGE 2 y (and (E x y) (= y y)))"), 0)
        assert compiled_verdicts(compiled, star(4)) == [1, 0, 0, 0]
        assert compiled_verdicts(compiled, cycle(5)) == [1] * 5


class TestCertify:
    def test_certifies_on_corpus(self, rng):
        phi = parse_formula(EXAMPLE_AT_MOST_ONE_BUSY_NEIGHBOUR)
        compiled = compile_formula(phi, 1)
        corpus = [busy_neighbour_graph(1)] + labelled_corpus(rng, 8, 1)
        report = certify(compiled, corpus)
        assert report.ok and not report.vacuous
        assert report.graphs_checked == 9

    def test_fault_injection_detected(self, rng):
        phi = parse_formula("(existsGE 2 y (and (E x y) (P 1 y)))")
        compiled = compile_formula(phi, 1)
        stage = compiled.model.layers[0].comb.stages[0]
        bad_bias = tuple(b - 1 if i == len(stage.bias) - 1 else b
                         for i, b in enumerate(stage.bias))
        object.__setattr__(stage, "bias", bad_bias)
        report = certify(compiled, labelled_corpus(rng, 8, 1))
        assert not report.ok
        assert report.first_counterexample() is not None

    def test_empty_corpus_vacuous(self):
        compiled = compile_formula(parse_formula("(P 1 x)"), 1)
        report = certify(compiled, [])
        assert report.ok and report.vacuous

    def test_rejects_float_mode(self):
        compiled = compile_formula(parse_formula("(P 1 x)"), 1, numeric_mode="float64")
        with pytest.raises(ValueError):
            certify(compiled, [])

    def test_rejects_label_mismatch(self):
        compiled = compile_formula(parse_formula("(P 1 x)"), 1)
        with pytest.raises(ValueError):
            certify(compiled, [cycle(3)])
