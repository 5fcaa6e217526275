"""Counting logic over graphs: ASTs, s-expression syntax, evaluation,
and fragment analysis.

Formulas are built from atoms ``x = y``, ``E(x, y)``, ``R_i(x, y)`` (for
binary structures) and ``P_i(x)`` with Boolean connectives and counting
quantifiers "there exist at least p vertices y with ...".  Plain
existential and universal quantifiers are sugar::

    (exists y f)  ==  (existsGE 1 y f)
    (forall y f)  ==  (not (existsGE 1 y (not f)))

Concrete syntax is s-expressions, e.g. the formula "x has at most one
neighbour with more than ten P_1-labelled neighbours"::

    (not (existsGE 2 y (and (E x y) (existsGE 11 x (and (E y x) (P 1 x))))))

The guarded fragment restricts quantification to
``(existsGE p y (and (E x y) psi))`` where y is the quantified variable,
x is a distinct variable, and every free variable of ``psi`` is y.  A
tautological atom ``(= y y)`` is admitted so that pure degree counting
stays guarded.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .graphs import BinaryStructure, LabelledGraph


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Formula:
    def free_vars(self) -> frozenset[str]:
        return _free_vars(self)


@dataclass(frozen=True)
class VarEq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Edge(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Rel(Formula):
    index: int  # 1-based relation index
    left: str
    right: str


@dataclass(frozen=True)
class Label(Formula):
    index: int  # 1-based label index
    var: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    subs: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    subs: tuple[Formula, ...]


@dataclass(frozen=True)
class CountExists(Formula):
    threshold: int  # at least this many witnesses; >= 1
    var: str
    body: Formula

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("counting threshold must be >= 1")


@lru_cache(maxsize=None)
def _free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, (VarEq, Edge)):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, Rel):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, Label):
        return frozenset((phi.var,))
    if isinstance(phi, Not):
        return _free_vars(phi.sub)
    if isinstance(phi, (And, Or)):
        out: frozenset[str] = frozenset()
        for s in phi.subs:
            out |= _free_vars(s)
        return out
    if isinstance(phi, CountExists):
        return _free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def all_vars(phi: Formula) -> frozenset[str]:
    """All variable names occurring in the formula, free or bound."""
    if isinstance(phi, (VarEq, Edge, Rel)):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, Label):
        return frozenset((phi.var,))
    if isinstance(phi, Not):
        return all_vars(phi.sub)
    if isinstance(phi, (And, Or)):
        out: frozenset[str] = frozenset()
        for s in phi.subs:
            out |= all_vars(s)
        return out
    if isinstance(phi, CountExists):
        return all_vars(phi.body) | {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def exists(var: str, body: Formula) -> CountExists:
    return CountExists(1, var, body)


def forall(var: str, body: Formula) -> Not:
    return Not(CountExists(1, var, Not(body)))


def top(var: str) -> VarEq:
    """The tautology (= var var)."""
    return VarEq(var, var)


# ---------------------------------------------------------------------------
# S-expression syntax
# ---------------------------------------------------------------------------

class FormulaParseError(ValueError):
    pass


def _tokenise(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise FormulaParseError("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _read(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise FormulaParseError("missing closing parenthesis")
        return items, pos + 1
    if tok == ")":
        raise FormulaParseError("unexpected ')'")
    return tok, pos + 1


def _build(sexp) -> Formula:
    if isinstance(sexp, str):
        raise FormulaParseError(f"bare atom {sexp!r} is not a formula")
    if not sexp:
        raise FormulaParseError("empty form")
    head = sexp[0]
    args = sexp[1:]
    if head == "=" and len(args) == 2:
        return VarEq(args[0], args[1])
    if head == "E" and len(args) == 2:
        return Edge(args[0], args[1])
    if head == "R" and len(args) == 3:
        return Rel(int(args[0]), args[1], args[2])
    if head == "P" and len(args) == 2:
        return Label(int(args[0]), args[1])
    if head == "not" and len(args) == 1:
        return Not(_build(args[0]))
    if head == "and" and len(args) >= 1:
        return And(tuple(_build(a) for a in args))
    if head == "or" and len(args) >= 1:
        return Or(tuple(_build(a) for a in args))
    if head == "existsGE" and len(args) == 3:
        p = int(args[0])
        return CountExists(p, args[1], _build(args[2]))
    if head == "exists" and len(args) == 2:
        return exists(args[0], _build(args[1]))
    if head == "forall" and len(args) == 2:
        return forall(args[0], _build(args[1]))
    raise FormulaParseError(f"cannot parse form {sexp!r}")


def parse_formula(text: str) -> Formula:
    tokens = _tokenise(text)
    sexp, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise FormulaParseError("trailing input after formula")
    return _build(sexp)


def format_formula(phi: Formula) -> str:
    if isinstance(phi, VarEq):
        return f"(= {phi.left} {phi.right})"
    if isinstance(phi, Edge):
        return f"(E {phi.left} {phi.right})"
    if isinstance(phi, Rel):
        return f"(R {phi.index} {phi.left} {phi.right})"
    if isinstance(phi, Label):
        return f"(P {phi.index} {phi.var})"
    if isinstance(phi, Not):
        return f"(not {format_formula(phi.sub)})"
    if isinstance(phi, And):
        return "(and " + " ".join(format_formula(s) for s in phi.subs) + ")"
    if isinstance(phi, Or):
        return "(or " + " ".join(format_formula(s) for s in phi.subs) + ")"
    if isinstance(phi, CountExists):
        return f"(existsGE {phi.threshold} {phi.var} {format_formula(phi.body)})"
    raise TypeError(f"not a formula: {phi!r}")


def formula_size(phi: Formula) -> int:
    if isinstance(phi, (VarEq, Edge, Rel, Label)):
        return 1
    if isinstance(phi, Not):
        return 1 + formula_size(phi.sub)
    if isinstance(phi, (And, Or)):
        return 1 + sum(formula_size(s) for s in phi.subs)
    if isinstance(phi, CountExists):
        return 1 + formula_size(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

class UnboundVariable(ValueError):
    pass


def evaluate(phi: Formula, G: LabelledGraph | BinaryStructure,
             assignment: dict[str, int] | None = None) -> bool:
    """Model checking by direct recursion over the formula.

    Counting quantifiers iterate over all vertices, so the cost is
    O(n^(quantifier rank + 1)) up to memoisation; results are cached per
    (subformula, restriction of the assignment to its free variables).
    """
    assignment = dict(assignment or {})
    missing = phi.free_vars() - assignment.keys()
    if missing:
        raise UnboundVariable(f"unbound free variables: {sorted(missing)}")
    for var, v in assignment.items():
        if not (0 <= v < G.n):
            raise ValueError(f"assignment {var}={v} out of range")

    cache: dict = {}

    def rec(node: Formula, env: dict[str, int]) -> bool:
        fv = node.free_vars()
        key = (id(node), tuple(sorted((x, env[x]) for x in fv)))
        hit = cache.get(key)
        if hit is not None:
            return hit
        if isinstance(node, VarEq):
            res = env[node.left] == env[node.right]
        elif isinstance(node, Edge):
            if not isinstance(G, LabelledGraph):
                raise TypeError("edge atom needs a graph; use (R i x y) on structures")
            res = G.has_edge(env[node.left], env[node.right])
        elif isinstance(node, Rel):
            if not isinstance(G, BinaryStructure):
                raise TypeError("relation atom needs a binary structure")
            res = G.related(node.index - 1, env[node.left], env[node.right])
        elif isinstance(node, Label):
            if node.index > G.num_labels:
                raise ValueError(f"label index {node.index} out of range")
            res = bool(G.labels[node.index - 1][env[node.var]])
        elif isinstance(node, Not):
            res = not rec(node.sub, env)
        elif isinstance(node, And):
            res = all(rec(s, env) for s in node.subs)
        elif isinstance(node, Or):
            res = any(rec(s, env) for s in node.subs)
        elif isinstance(node, CountExists):
            count = 0
            inner = dict(env)
            for w in range(G.n):
                inner[node.var] = w
                if rec(node.body, inner):
                    count += 1
                    if count >= node.threshold:
                        break
            res = count >= node.threshold
        else:
            raise TypeError(f"not a formula: {node!r}")
        cache[key] = res
        return res

    return rec(phi, assignment)


def evaluate_unary(phi: Formula, G: LabelledGraph | BinaryStructure,
                   var: str | None = None) -> list[bool]:
    """Evaluate a formula with one free variable on every vertex."""
    fv = sorted(phi.free_vars())
    if var is None:
        if len(fv) != 1:
            raise ValueError(f"expected one free variable, got {fv}")
        var = fv[0]
    return [evaluate(phi, G, {var: v}) for v in range(G.n)]


# ---------------------------------------------------------------------------
# Fragment analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FragmentReport:
    variable_count: int
    quantifier_rank: int
    is_guarded: bool
    guard_violation: str | None = None


def quantifier_rank(phi: Formula) -> int:
    if isinstance(phi, (VarEq, Edge, Rel, Label)):
        return 0
    if isinstance(phi, Not):
        return quantifier_rank(phi.sub)
    if isinstance(phi, (And, Or)):
        return max(quantifier_rank(s) for s in phi.subs)
    if isinstance(phi, CountExists):
        return 1 + quantifier_rank(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def guard_of(phi: CountExists) -> tuple[Edge, Formula | None] | None:
    """Split a guarded quantifier body into (guard edge, rest).

    The body must be the guard atom alone or a conjunction containing
    exactly one edge atom between the quantified variable and one other
    variable; either orientation of the (symmetric) edge is accepted.
    Returns None if the body has no admissible guard.
    """
    y = phi.var

    def is_guard(a: Formula) -> bool:
        return (isinstance(a, Edge) and {a.left, a.right} != {y}
                and y in (a.left, a.right))

    body = phi.body
    if is_guard(body):
        return body, None  # type: ignore[return-value]
    if isinstance(body, And):
        guards = [s for s in body.subs if is_guard(s)]
        if len(guards) == 1:
            rest = tuple(s for s in body.subs if s is not guards[0])
            if not rest:
                return guards[0], None  # type: ignore[return-value]
            return guards[0], rest[0] if len(rest) == 1 else And(rest)  # type: ignore[return-value]
    return None


def _check_guarded(phi: Formula, path: str) -> str | None:
    """Return a violation path, or None if guarded."""
    if isinstance(phi, (VarEq, Label, Edge, Rel)):
        # guardedness constrains quantifier shapes only; atoms are free
        return None
    if isinstance(phi, Not):
        return _check_guarded(phi.sub, path + "/not")
    if isinstance(phi, (And, Or)):
        tag = "and" if isinstance(phi, And) else "or"
        for i, s in enumerate(phi.subs):
            bad = _check_guarded(s, f"{path}/{tag}[{i}]")
            if bad:
                return bad
        return None
    if isinstance(phi, CountExists):
        here = f"{path}/existsGE[{phi.threshold} {phi.var}]"
        split = guard_of(phi)
        if split is None:
            return f"{here}: quantifier without an edge guard"
        _, rest = split
        if rest is not None:
            extra = rest.free_vars() - {phi.var}
            if extra:
                return f"{here}: body frees {sorted(extra)} besides the quantified variable"
            return _check_guarded(rest, here)
        return None
    raise TypeError(f"not a formula: {phi!r}")


def fragment_check(phi: Formula) -> FragmentReport:
    """Variable count, quantifier rank, and guardedness of a formula."""
    violation = _check_guarded(phi, "")
    return FragmentReport(
        variable_count=len(all_vars(phi)),
        quantifier_rank=quantifier_rank(phi),
        is_guarded=violation is None,
        guard_violation=violation,
    )
