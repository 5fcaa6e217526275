"""Compile guarded two-variable counting formulas into thresholded
affine message-passing layers.

The subformulas of the input (with guarded quantification fused into a
single counting operation) are arranged in a topological plan whose
first ``num_labels`` entries are the label atoms.  One layer per
non-atom plan entry carries all previously computed indicator
coordinates through unchanged and computes its own indicator with a
single linearised-sigmoid gate:

* counting gate  "at least p neighbours satisfy plan entry s":
  read coordinate s of the neighbour-sum block, bias 1 - p;
* negation: -1 times the operand coordinate, bias 1;
* conjunction: sum of operand coordinates, bias 1 - arity;
* disjunction: sum of operand coordinates, bias 0;
* tautology: empty row, bias 1.

On 0/1 inputs every gate output is exactly 0 or 1 in rational
arithmetic, so the compiled model's answers coincide with the model
checker's on every graph, with margin exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gnn import (AffineStack, AffineStage, GnnLayer, GnnModel, RATIONAL, run)
from .graphs import LabelledGraph
from .logic import (And, CountExists, Edge, Formula, Label, Not, Or, VarEq,
                    evaluate, fragment_check, guard_of, top)


class CompileError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Plans: deduplicated unary operations in subformula order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PLabel:
    index: int  # 1-based label index


@dataclass(frozen=True)
class PTop:
    pass


@dataclass(frozen=True)
class PNot:
    operand: int


@dataclass(frozen=True)
class PAnd:
    operands: tuple[int, ...]


@dataclass(frozen=True)
class POr:
    operands: tuple[int, ...]


@dataclass(frozen=True)
class PCount:
    threshold: int
    operand: int


PlanOp = PLabel | PTop | PNot | PAnd | POr | PCount


@dataclass
class SubformulaPlan:
    """Plan entries in an order compatible with the subformula order;
    entries 0..num_labels-1 are the label atoms, entry ``root`` is the
    input formula."""

    num_labels: int
    ops: tuple[PlanOp, ...]
    root: int

    @property
    def depth(self) -> int:
        return len(self.ops) - self.num_labels


def plan(phi: Formula, num_labels: int) -> SubformulaPlan:
    """Normalise a guarded one-free-variable formula into a plan.

    Subformulas are deduplicated up to renaming of the free variable
    (each guarded quantifier is one operation reading its body through
    the quantified variable).
    """
    report = fragment_check(phi)
    if not report.is_guarded:
        raise CompileError(f"formula is not guarded: {report.guard_violation}")
    if report.variable_count > 2:
        raise CompileError(
            f"formula uses {report.variable_count} variables; at most 2 supported")
    if len(phi.free_vars()) != 1:
        raise CompileError(f"expected one free variable, got {sorted(phi.free_vars())}")

    ops: list[PlanOp] = [PLabel(i + 1) for i in range(num_labels)]
    index: dict[PlanOp, int] = {op: i for i, op in enumerate(ops)}

    def emit(op: PlanOp) -> int:
        hit = index.get(op)
        if hit is not None:
            return hit
        ops.append(op)
        index[op] = len(ops) - 1
        return len(ops) - 1

    def translate(node: Formula, var: str) -> int:
        if isinstance(node, Label):
            if not (1 <= node.index <= num_labels):
                raise CompileError(
                    f"label index {node.index} out of range for {num_labels} labels")
            if node.var != var:
                raise CompileError(f"label atom on unexpected variable {node.var}")
            return emit(PLabel(node.index))
        if isinstance(node, VarEq):
            if node.left == node.right:
                return emit(PTop())
            raise CompileError("variable equality between distinct variables "
                               "is not a guarded unary operation")
        if isinstance(node, Edge):
            raise CompileError("edge atom outside a quantifier guard")
        if isinstance(node, Not):
            return emit(PNot(translate(node.sub, var)))
        if isinstance(node, (And, Or)):
            kids = tuple(sorted(translate(s, var) for s in node.subs))
            return emit(PAnd(kids) if isinstance(node, And) else POr(kids))
        if isinstance(node, CountExists):
            split = guard_of(node)
            if split is None:
                raise CompileError("quantifier without an admissible guard")
            _, rest = split
            body = top(node.var) if rest is None else rest
            return emit(PCount(node.threshold, translate(body, node.var)))
        raise CompileError(f"unsupported node kind {type(node).__name__}")

    root = translate(phi, next(iter(phi.free_vars())))
    return SubformulaPlan(num_labels, tuple(ops), root)


def plan_formula(p: SubformulaPlan, i: int, var: str = "x") -> Formula:
    """The formula (free variable ``var``) computed by plan entry i."""
    other = "y" if var == "x" else "x"
    op = p.ops[i]
    if isinstance(op, PLabel):
        return Label(op.index, var)
    if isinstance(op, PTop):
        return top(var)
    if isinstance(op, PNot):
        return Not(plan_formula(p, op.operand, var))
    if isinstance(op, PAnd):
        return And(tuple(plan_formula(p, s, var) for s in op.operands))
    if isinstance(op, POr):
        return Or(tuple(plan_formula(p, s, var) for s in op.operands))
    if isinstance(op, PCount):
        return CountExists(op.threshold, other,
                           And((Edge(var, other), plan_formula(p, op.operand, other))))
    raise TypeError(f"not a plan op: {op!r}")


# ---------------------------------------------------------------------------
# Compilation
# ---------------------------------------------------------------------------

@dataclass
class CompiledGnn:
    model: GnnModel
    plan: SubformulaPlan
    formula: Formula


def _gate_row(op: PlanOp, in_dim: int) -> tuple[list[int], int]:
    """The gate row (over self block ++ neighbour-sum block) and bias."""
    row = [0] * (2 * in_dim)
    if isinstance(op, PTop):
        return row, 1
    if isinstance(op, PNot):
        row[op.operand] = -1
        return row, 1
    if isinstance(op, PAnd):
        for s in op.operands:
            row[s] += 1
        return row, 1 - len(op.operands)
    if isinstance(op, POr):
        for s in op.operands:
            row[s] += 1
        return row, 0
    if isinstance(op, PCount):
        row[in_dim + op.operand] = 1
        return row, 1 - op.threshold
    raise TypeError(f"no gate for {op!r}")


def compile_formula(phi: Formula, num_labels: int,
                    numeric_mode: str = RATIONAL) -> CompiledGnn:
    """Compile a guarded formula into a model with one layer per plan
    entry above the label atoms; the readout projects the root indicator."""
    p = plan(phi, num_labels)
    layers = []
    for t, op in enumerate(p.ops[num_labels:], start=1):
        in_dim = num_labels + t - 1
        out_dim = num_labels + t
        rows = []
        bias = []
        for i in range(in_dim):  # carry previously computed indicators
            row = [0] * (2 * in_dim)
            row[i] = 1
            rows.append(tuple(row))
            bias.append(0)
        grow, gbias = _gate_row(op, in_dim)
        rows.append(tuple(grow))
        bias.append(gbias)
        assert len(rows) == out_dim
        comb = AffineStack((AffineStage(tuple(rows), tuple(bias), "lsig"),))
        layers.append(GnnLayer(comb))

    ro_row = [0] * len(p.ops)
    ro_row[p.root] = 1
    readout = AffineStack((AffineStage((tuple(ro_row),), (0,), "identity"),))
    model = GnnModel(input_dim=num_labels, layers=tuple(layers),
                     readout=readout, numeric_mode=numeric_mode)
    return CompiledGnn(model, p, phi)


# ---------------------------------------------------------------------------
# Certification against the model checker
# ---------------------------------------------------------------------------

@dataclass
class CertReport:
    ok: bool
    vacuous: bool
    graphs_checked: int
    failures: list  # (graph index, layer, vertex, plan entry, expected, got)

    def first_counterexample(self):
        return self.failures[0] if self.failures else None


def certify(compiled: CompiledGnn, corpus: list[LabelledGraph]) -> CertReport:
    """Check, per layer and per vertex, that every computed coordinate is
    exactly the model checker's verdict for its plan entry."""
    if compiled.model.numeric_mode != RATIONAL:
        raise ValueError("certification requires the exact rational mode")
    p = compiled.plan
    failures = []
    for gi, G in enumerate(corpus):
        if G.num_labels != p.num_labels:
            raise ValueError(
                f"corpus graph {gi} has {G.num_labels} labels, plan expects {p.num_labels}")
        res = run(compiled.model, G)
        truth = {}
        for i in range(len(p.ops)):
            phi_i = plan_formula(p, i)
            truth[i] = [evaluate(phi_i, G, {"x": v}) for v in range(G.n)]
        for t, feats in enumerate(res.history):
            width = p.num_labels + t
            for v in range(G.n):
                vec = feats[v]
                for i in range(width):
                    expected = 1 if truth[i][v] else 0
                    if vec[i] != expected:
                        failures.append((gi, t, v, i, expected, vec[i]))
    return CertReport(not failures, vacuous=not corpus,
                      graphs_checked=len(corpus), failures=failures)
