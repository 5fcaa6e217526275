"""Theorem-indexed verification suites.

Each suite mechanises one statement about the algorithms in this package
as a randomised or exhaustive check, deterministic given (suite, seed).
Reports carry per-check pass/fail/skip status, counterexample graph
files with a reproduction command, and timings (excluded from the
comparable form).
"""

from __future__ import annotations

import itertools
import json
import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import compiler, constructions, fastcr, gnn, logic, oracles, synth
from .colouring import hat_invariant
from .gio import write_graph
from .graphs import (LabelledGraph, atomic_type, complete, cycle,
                     disjoint_union, gnm, gnp, rook4x4, shrikhande, star,
                     two_triangles, with_random_labels)
from .wl import (colour_refinement, derived_structure, distinguishes_graphs,
                 owl, pair_run, wl)


@dataclass
class SuiteSpec:
    suite: str
    n: int | None = None
    trials: int | None = None
    seed: int = 0
    budget: int | None = None

    def resolved(self) -> "SuiteSpec":
        dn, dt = SUITE_DEFAULTS[self.suite]
        return SuiteSpec(self.suite,
                         self.n if self.n is not None else dn,
                         self.trials if self.trials is not None else dt,
                         self.seed, self.budget)


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | skip
    details: str = ""


@dataclass
class SuiteReport:
    suite: str
    seed: int
    n: int
    trials: int
    checks: list[CheckResult] = field(default_factory=list)
    counterexamples: list[dict] = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    @property
    def skipped(self) -> bool:
        return any(c.status == "skip" for c in self.checks)

    def to_dict(self, include_timings: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "seed": self.seed,
            "n": self.n,
            "trials": self.trials,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "status": c.status, "details": c.details}
                for c in self.checks
            ],
            "counterexamples": self.counterexamples,
        }
        if include_timings:
            out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out


class _Ctx:
    def __init__(self, spec: SuiteSpec):
        self.spec = spec
        self.rng = random.Random(spec.seed)
        self.report = SuiteReport(spec.suite, spec.seed, spec.n, spec.trials)

    def check(self, name: str, ok: bool, details: str = "") -> None:
        self.report.checks.append(
            CheckResult(name, "pass" if ok else "fail", details))

    def skip(self, name: str, details: str) -> None:
        self.report.checks.append(CheckResult(name, "skip", details))

    def counterexample(self, description: str, graphs: dict[str, LabelledGraph],
                       repro: str) -> None:
        self.report.counterexamples.append({
            "description": description,
            "graphs": {name: write_graph(G) for name, G in graphs.items()},
            "repro": repro,
        })

    def random_graph(self, n_max: int, labels_max: int = 0,
                     n_min: int = 1) -> LabelledGraph:
        n = self.rng.randint(n_min, n_max)
        p = self.rng.choice([0.2, 0.5, 0.8])
        G = gnp(n, p, self.rng.randrange(2**31))
        if labels_max:
            count = self.rng.randint(0, labels_max)
            if count:
                G = with_random_labels(G, count, self.rng.randrange(2**31))
        return G

    def random_regular_pair(self):
        """Degree-regular pairs stress the refinement blind spots."""
        options = [
            (cycle(6), two_triangles()),
            (cycle(8), disjoint_union(cycle(4), cycle(4))),
            (cycle(5), cycle(5)),
            (complete(4), complete(4)),
        ]
        return options[self.rng.randrange(len(options))]


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def _suite_cr1wl(ctx: _Ctx) -> None:
    """Graph distinguishability of colour refinement and 1-WL coincides
    at every round."""
    violations = 0
    pairs = 0
    while pairs < ctx.spec.trials:
        if ctx.rng.random() < 0.15:
            G, H = ctx.random_regular_pair()
        else:
            G = ctx.random_graph(ctx.spec.n, labels_max=1)
            H = ctx.random_graph(ctx.spec.n, labels_max=1)
            if G.num_labels != H.num_labels:
                continue
        pairs += 1
        cr_a, cr_b = pair_run(G, H, "cr")
        wl_a, wl_b = pair_run(G, H, "wl", 1)
        horizon = max(cr_a.last_round, cr_b.last_round,
                      wl_a.last_round, wl_b.last_round)
        for t in range(horizon + 1):
            cr_v = distinguishes_graphs(cr_a, cr_b,
                                        min(t, cr_a.last_round, cr_b.last_round))
            wl_v = distinguishes_graphs(wl_a, wl_b,
                                        min(t, wl_a.last_round, wl_b.last_round))
            if cr_v != wl_v:
                violations += 1
                ctx.counterexample(
                    f"refinement and 1-WL verdicts differ at round {t}",
                    {"left": G, "right": H},
                    f"wlgnn verify --suite cr1wl --seed {ctx.spec.seed}")
                break
    ctx.check("cr-equals-wl1-on-graphs", violations == 0,
              f"{pairs} pairs, {violations} violations")


def _sandwich_violation(ctx, G, H, k) -> str | None:
    wl_a, wl_b = pair_run(G, H, "wl", k)
    o_a, o_b = pair_run(G, H, "owl", k + 1)
    wl_last = min(wl_a.last_round, wl_b.last_round)
    o_last = min(o_a.last_round, o_b.last_round)
    for t in range(max(wl_last, o_last) + 2):
        wl_now = distinguishes_graphs(wl_a, wl_b, min(t, wl_last))
        owl_now = distinguishes_graphs(o_a, o_b, min(t, o_last))
        wl_next = distinguishes_graphs(wl_a, wl_b, min(t + 1, wl_last))
        if wl_now and not owl_now:
            return f"wl_{k} at {t} but not owl_{k+1} at {t}"
        if owl_now and not wl_next:
            return f"owl_{k+1} at {t} but not wl_{k} at {t+1}"
    return None


def _suite_owl_sandwich(ctx: _Ctx) -> None:
    """Distinguishing power: wl_k at t implies owl_(k+1) at t implies
    wl_k at t+1; consequently the stable verdicts coincide."""
    for k in (1, 2):
        violations = 0
        for _ in range(ctx.spec.trials):
            G = ctx.random_graph(ctx.spec.n, n_min=2)
            H = ctx.random_graph(ctx.spec.n, n_min=2)
            bad = _sandwich_violation(ctx, G, H, k)
            if bad:
                violations += 1
                ctx.counterexample(
                    f"sandwich violated (k={k}): {bad}", {"left": G, "right": H},
                    f"wlgnn verify --suite owl-sandwich --seed {ctx.spec.seed}")
        ctx.check(f"sandwich-k{k}", violations == 0,
                  f"{ctx.spec.trials} pairs, {violations} violations")


def _lemma_owl_violation(G, H, k, t_max=3) -> str | None:
    o_a, o_b = pair_run(G, H, "owl", k + 1, t_max=t_max)
    w_a, w_b = pair_run(G, H, "wl", k, t_max=t_max)
    for t in range(min(o_a.last_round, o_b.last_round,
                       w_a.last_round, w_b.last_round) + 1):
        by_owl: dict = {}
        by_sig: dict = {}
        for X, run_o, run_w in ((G, o_a, w_a), (H, o_b, w_b)):
            for vs in itertools.product(X.vertices, repeat=k + 1):
                key = vs if k + 1 > 1 else vs[0]
                colour = run_o.colour(key, t)
                deletions = []
                for i in range(k + 1):
                    rest = vs[:i] + vs[i + 1:]
                    deletions.append(run_w.colour(rest if k > 1 else rest[0], t))
                sig = (atomic_type(X, vs), tuple(deletions))
                by_owl.setdefault(colour, set()).add(sig)
                by_sig.setdefault(sig, set()).add(colour)
        if any(len(v) > 1 for v in by_owl.values()):
            return f"one owl_{k+1} colour covers several signatures at round {t}"
        if any(len(v) > 1 for v in by_sig.values()):
            return f"one signature covers several owl_{k+1} colours at round {t}"
    return None


def _suite_lemma_owl(ctx: _Ctx) -> None:
    """owl_(k+1) colour equality is equivalent to equal atomic types plus
    equal wl_k colours of all deletions."""
    for k in (1, 2):
        violations = 0
        trials = ctx.spec.trials if k == 1 else max(ctx.spec.trials // 2, 1)
        for _ in range(trials):
            G = ctx.random_graph(ctx.spec.n, n_min=2)
            H = ctx.random_graph(ctx.spec.n, n_min=2)
            bad = _lemma_owl_violation(G, H, k)
            if bad:
                violations += 1
                ctx.counterexample(
                    f"deletion lemma violated (k={k}): {bad}",
                    {"left": G, "right": H},
                    f"wlgnn verify --suite lemma-owl --seed {ctx.spec.seed}")
        ctx.check(f"deletion-lemma-k{k}", violations == 0,
                  f"{trials} pairs, {violations} violations")


def _suite_ag_equivalence(ctx: _Ctx) -> None:
    """Oblivious 2-WL colours on G match 1-WL colours on the derived
    tuple structure: the per-tuple biconditional within each graph, and
    the refinement direction across graphs.

    (The full cross-graph biconditional fails: the all-vertex census of
    1-WL sees the graph's global tuple-type counts, which the
    per-position substitution multisets do not carry; see the design
    notes.)
    """
    violations = 0
    for _ in range(ctx.spec.trials):
        G = ctx.random_graph(min(ctx.spec.n, 6), n_min=2)
        H = ctx.random_graph(min(ctx.spec.n, 6), n_min=2)
        o_a, o_b = pair_run(G, H, "owl", 2, t_max=3)
        D_g, D_h = derived_structure(G, 2), derived_structure(H, 2)
        w_a, w_b = pair_run(D_g.structure, D_h.structure, "wl", 1, t_max=3)
        t_last = min(o_a.last_round, o_b.last_round,
                     w_a.last_round, w_b.last_round)
        ok = True
        for t in range(t_last + 1):
            by_wl: dict = {}
            for D, run_o, run_w, X in ((D_g, o_a, w_a, G), (D_h, o_b, w_b, H)):
                by_owl: dict = {}
                by_wl_local: dict = {}
                for vs in itertools.product(X.vertices, repeat=2):
                    co = run_o.colour(vs, t)
                    cw = run_w.colour(D.index(vs), t)
                    by_owl.setdefault(co, set()).add(cw)
                    by_wl_local.setdefault(cw, set()).add(co)
                    by_wl.setdefault(cw, set()).add(co)
                # within one graph: exact biconditional
                if (any(len(v) > 1 for v in by_owl.values())
                        or any(len(v) > 1 for v in by_wl_local.values())):
                    ok = False
            # across graphs: tuple-structure colours refine oblivious colours
            if any(len(v) > 1 for v in by_wl.values()):
                ok = False
            if not ok:
                break
        if not ok:
            violations += 1
            ctx.counterexample(
                "derived-structure equivalence failed",
                {"left": G, "right": H},
                f"wlgnn verify --suite ag-equivalence --seed {ctx.spec.seed}")
    ctx.check("owl2-matches-wl1-on-derived-structure", violations == 0,
              f"{ctx.spec.trials} graph pairs, per-graph biconditional plus "
              f"cross-graph refinement, {violations} violations")


def _suite_sum_lemma(ctx: _Ctx) -> None:
    """Digit encoders: sums stay below min X and are injective on
    multisets of order < m (exhaustive small cases plus random samples)."""
    exhaustive_bad = 0
    for m in range(2, 6):
        for size in range(1, 5):
            values = []
            while len(values) < size:
                x = Fraction(ctx.rng.randint(1, 63), 64)
                if 0 < x < 1 and x not in values:
                    values.append(x)
            enc = constructions.build_sum_encoder(m, values)
            lo = min(values)
            seen: dict = {}
            universe = [()]
            for order in range(1, m):
                universe.extend(
                    itertools.combinations_with_replacement(values, order))
            for ms in universe:
                total = enc.encode(ms)
                if ms and total >= lo:
                    exhaustive_bad += 1
                if seen.setdefault(total, ms) != ms:
                    exhaustive_bad += 1
    ctx.check("exhaustive-injectivity", exhaustive_bad == 0,
              f"all multisets for |X|<=4, m<=5 ({exhaustive_bad} violations)")

    sample_bad = 0
    for _ in range(ctx.spec.trials):
        m = ctx.rng.randint(2, 12)
        size = ctx.rng.randint(1, 6)
        values = []
        while len(values) < size:
            x = Fraction(ctx.rng.randint(1, 255), 256)
            if x not in values:
                values.append(x)
        enc = constructions.build_sum_encoder(m, values)
        lo = min(values)
        a = [ctx.rng.choice(values) for _ in range(ctx.rng.randint(0, m - 1))]
        b = [ctx.rng.choice(values) for _ in range(ctx.rng.randint(0, m - 1))]
        if a and enc.encode(a) >= lo:
            sample_bad += 1
        if (sorted(a) != sorted(b)) and enc.encode(a) == enc.encode(b):
            sample_bad += 1
    ctx.check("sampled-collision-search", sample_bad == 0,
              f"{ctx.spec.trials} samples, {sample_bad} violations")


def _suite_gnn_upper(ctx: _Ctx) -> None:
    """No d-layer network separates vertices that round-d refinement
    leaves together (exact rational weights)."""
    violations = 0
    models = ctx.spec.trials
    for _ in range(models):
        G = ctx.random_graph(ctx.spec.n, n_min=2, labels_max=1)
        H = ctx.random_graph(ctx.spec.n, n_min=2, labels_max=1)
        if G.num_labels != H.num_labels:
            H = with_random_labels(H, G.num_labels, ctx.rng.randrange(2**31)) \
                if G.num_labels else LabelledGraph.make(H.n, H.edges)
        d = ctx.rng.randint(1, 4)
        in_dim = max(G.num_labels, 1)
        layers = []
        p = in_dim
        for _ in range(d):
            q = ctx.rng.randint(1, 3)
            rows = tuple(
                tuple(Fraction(ctx.rng.randint(-4, 4), ctx.rng.randint(1, 4))
                      for _ in range(2 * p))
                for _ in range(q))
            bias = tuple(Fraction(ctx.rng.randint(-2, 2)) for _ in range(q))
            act = ctx.rng.choice(["lsig", "relu", "identity"])
            layers.append(gnn.GnnLayer(gnn.AffineStack(
                (gnn.AffineStage(rows, bias, act),))))
            p = q
        model = gnn.GnnModel(in_dim, layers=tuple(layers))
        run_g, run_h = pair_run(G, H, "cr", t_max=d)
        t = min(d, run_g.last_round, run_h.last_round)
        out_g = gnn.run(model, G).per_vertex
        out_h = gnn.run(model, H).per_vertex
        for v in G.vertices:
            for w in H.vertices:
                if run_g.colour(v, t) == run_h.colour(w, t) and out_g[v] != out_h[w]:
                    violations += 1
                    ctx.counterexample(
                        f"model split a round-{d} refinement class",
                        {"left": G, "right": H},
                        f"wlgnn verify --suite gnn-upper --seed {ctx.spec.seed}")
    ctx.check("refinement-refines-network-outputs", violations == 0,
              f"{models} random models, {violations} violations")
    # graph-level corollary on the canonical refinement-blind pair
    blind = 0
    for _ in range(10):
        G, H = cycle(6), two_triangles()
        model = gnn.GnnModel(1, layers=(gnn.GnnLayer(gnn.AffineStack((
            gnn.AffineStage(
                ((Fraction(ctx.rng.randint(-3, 3)), Fraction(ctx.rng.randint(-3, 3))),),
                (Fraction(ctx.rng.randint(-1, 1)),), "lsig"),))),),
            aggregate_readout=gnn.AffineStack((gnn.AffineStage(((1,),), (0,),
                                                               "identity"),)))
        if gnn.run(model, G).graph_output != gnn.run(model, H).graph_output:
            blind += 1
    ctx.check("aggregate-readout-blind-pair", blind == 0,
              f"10 random models on the six-cycle vs two triangles, {blind} splits")


def _suite_gnn_lower(ctx: _Ctx) -> None:
    """One recurrent digit network reproduces the refinement partitions
    of every corpus graph, round by round, in exact arithmetic."""
    corpus = [ctx.random_graph(ctx.spec.n, labels_max=1)
              for _ in range(ctx.spec.trials)]
    by_labels: dict[int, gnn.GnnModel] = {}
    t_max = min(ctx.spec.n, 8)
    mismatches = 0
    for G in corpus:
        model = by_labels.setdefault(
            G.num_labels,
            constructions.build_wl_gnn(ctx.spec.n, G.num_labels, capacity=4096))
        res = gnn.run(model, G, rounds=t_max)
        cr = colour_refinement(G, t_max=t_max)
        for t in range(t_max + 1):
            ct = min(t, cr.last_round)
            feats: dict = {}
            for v, val in enumerate(res.history[t]):
                feats.setdefault(val, set()).add(v)
            cols: dict = {}
            colouring = cr.colouring_at(ct)
            for v in colouring.keys():
                cols.setdefault(colouring.colour(v), set()).add(v)
            if (set(map(frozenset, feats.values()))
                    != set(map(frozenset, cols.values()))):
                mismatches += 1
                ctx.counterexample(
                    f"feature partition differs from refinement at round {t}",
                    {"graph": G},
                    f"wlgnn verify --suite gnn-lower --seed {ctx.spec.seed}")
                break
    ctx.check("digit-network-partitions-equal-refinement", mismatches == 0,
              f"{len(corpus)} graphs, rounds 0..{t_max}, {mismatches} mismatches")


def _suite_cr_logic_synth(ctx: _Ctx) -> None:
    """Synthesised guarded formulas witness refinement differences; a pool
    of them never separates refinement-equal vertices."""
    witnessed = 0
    failures = 0
    pool: list[tuple] = []
    attempts = 0
    while witnessed < ctx.spec.trials and attempts < ctx.spec.trials * 20:
        attempts += 1
        G = ctx.random_graph(min(ctx.spec.n, 7), n_min=2, labels_max=1)
        H = ctx.random_graph(min(ctx.spec.n, 7), n_min=2, labels_max=1)
        if G.num_labels != H.num_labels:
            continue
        v = ctx.rng.randrange(G.n)
        w = ctx.rng.randrange(H.n)
        run_g, run_h = pair_run(G, H, "cr")
        t_found = None
        for t in range(min(run_g.last_round, run_h.last_round) + 1):
            if run_g.colour(v, t) != run_h.colour(w, t):
                t_found = t
                break
        if t_found is None:
            continue
        phi = synth.synthesize_distinguishing_formula(G, v, H, w, t_found)
        ok = phi is not None
        if ok:
            report = logic.fragment_check(phi)
            ok = (report.is_guarded and report.variable_count <= 2
                  and report.quantifier_rank <= t_found
                  and logic.evaluate(phi, G, {"x": v})
                  and not logic.evaluate(phi, H, {"x": w}))
        if ok:
            witnessed += 1
            if len(pool) < 400 and logic.formula_size(phi) <= 120:
                pool.append((phi, logic.fragment_check(phi).quantifier_rank))
        else:
            failures += 1
            ctx.counterexample(
                "synthesis failed on refinement-separated vertices",
                {"left": G, "right": H},
                f"wlgnn verify --suite cr-logic-synth --seed {ctx.spec.seed}")
    ctx.check("synthesised-witnesses", failures == 0 and witnessed >= ctx.spec.trials,
              f"{witnessed} witnesses, {failures} failures")

    seeds = [
        "(existsGE 1 y (and (E x y) (= y y)))",
        "(existsGE 2 y (and (E x y) (= y y)))",
        "(existsGE 3 y (and (E x y) (= y y)))",
        "(not (existsGE 2 y (and (E x y) (existsGE 2 x (and (E y x) (= x x))))))",
        "(existsGE 1 y (and (E x y) (existsGE 3 x (and (E y x) (= x x)))))",
    ]
    for s in seeds:
        phi = logic.parse_formula(s)
        pool.append((phi, logic.fragment_check(phi).quantifier_rank))
    pool = pool[:max(200, len(seeds))] if len(pool) > 200 else pool
    agreements = 0
    violations = 0
    graphs = [with_random_labels(ctx.random_graph(6, n_min=2), 1,
                                 ctx.rng.randrange(2**31))
              for _ in range(10)]
    cache: dict = {}
    for gi, G in enumerate(graphs):
        for hi, H in enumerate(graphs):
            if hi <= gi:
                continue
            run_g, run_h = pair_run(G, H, "cr")
            last = min(run_g.last_round, run_h.last_round)
            for v in G.vertices:
                for w in H.vertices:
                    for pi, (phi, rank) in enumerate(pool):
                        t = min(rank, last)
                        if run_g.colour(v, t) != run_h.colour(w, t):
                            continue
                        key_g = (pi, gi)
                        key_h = (pi, hi)
                        if key_g not in cache:
                            cache[key_g] = logic.evaluate_unary(phi, G, "x")
                        if key_h not in cache:
                            cache[key_h] = logic.evaluate_unary(phi, H, "x")
                        agreements += 1
                        if cache[key_g][v] != cache[key_h][w]:
                            violations += 1
    ctx.check("pool-respects-colour-equality",
              violations == 0 and len(pool) >= 5,
              f"pool of {len(pool)}, {agreements} colour-equal checks, "
              f"{violations} violations")


def _suite_compile_exact(ctx: _Ctx) -> None:
    """Compiled guarded formulas agree with the model checker vertexwise,
    with outputs exactly 0 or 1."""
    formulas = _compile_formula_pool()
    corpus = []
    while len(corpus) < 50:
        G = ctx.random_graph(9, n_min=1)
        corpus.append(with_random_labels(G, 2, ctx.rng.randrange(2**31)))
    corpus.append(_busy_star(1))
    corpus.append(_busy_star(2))
    bad = 0
    nonbit = 0
    for text in formulas:
        phi = logic.parse_formula(text)
        compiled = compiler.compile_formula(phi, 2)
        for G in corpus:
            want = logic.evaluate_unary(phi, G, "x")
            got = [out[0] for out in gnn.run(compiled.model, G).per_vertex]
            if got != [1 if t else 0 for t in want]:
                bad += 1
                ctx.counterexample(
                    f"compiled output mismatch for {text}", {"graph": G},
                    f"wlgnn verify --suite compile-exact --seed {ctx.spec.seed}")
                break
            if any(x != 0 and x != 1 for x in got):
                nonbit += 1
    ctx.check("compiled-agrees-with-checker", bad == 0,
              f"{len(formulas)} formulas x {len(corpus)} graphs, {bad} mismatches")
    ctx.check("margins-exactly-one", nonbit == 0,
              f"{nonbit} non-bit outputs")


def _busy_star(intermediates: int) -> LabelledGraph:
    edges = []
    marked = []
    nxt = 1 + intermediates
    for i in range(1, 1 + intermediates):
        edges.append((0, i))
        for _ in range(12):
            edges.append((i, nxt))
            marked.append(nxt)
            nxt += 1
    bits1 = [1 if v in marked else 0 for v in range(nxt)]
    bits2 = [0] * nxt
    return LabelledGraph.make(nxt, edges, [bits1, bits2])


def _compile_formula_pool() -> list[str]:
    guard = "(E x y)"
    inner = "(existsGE 11 x (and (E y x) (P 1 x)))"
    return [
        "(P 1 x)",
        "(P 2 x)",
        "(not (P 1 x))",
        "(and (P 1 x) (P 2 x))",
        "(or (P 1 x) (not (P 2 x)))",
        f"(not (existsGE 2 y (and {guard} {inner})))",
        f"(existsGE 1 y (and {guard} (P 1 y)))",
        f"(existsGE 2 y (and {guard} (P 1 y)))",
        f"(existsGE 3 y (and {guard} (= y y)))",
        f"(existsGE 1 y (and {guard} (not (P 1 y))))",
        f"(and (P 1 x) (existsGE 2 y (and {guard} (P 2 y))))",
        f"(or (existsGE 4 y (and {guard} (= y y))) (P 2 x))",
        f"(not (existsGE 1 y (and {guard} (and (P 1 y) (P 2 y)))))",
        f"(existsGE 1 y (and {guard} (existsGE 2 x (and (E y x) (P 1 x)))))",
        f"(existsGE 2 y (and {guard} (existsGE 2 x (and (E y x) (= x x)))))",
        f"(and (not (P 1 x)) (existsGE 1 y (and {guard} (P 1 y))))",
        f"(or (P 1 x) (existsGE 2 y (and {guard} (not (P 2 y)))))",
        f"(existsGE 1 y (and {guard} (or (P 1 y) (P 2 y))))",
        f"(not (existsGE 3 y (and {guard} (not (P 1 y)))))",
        f"(existsGE 1 y (and {guard} (not (existsGE 2 x (and (E y x) (P 2 x))))))",
        f"(and (existsGE 1 y (and {guard} (P 1 y))) (existsGE 1 y (and {guard} (P 2 y))))",
    ]


def _suite_kgnn(ctx: _Ctx) -> None:
    """Tuple networks over the derived structure: random ones never split
    oblivious-2-WL classes; the constructive one reproduces them."""
    violations = 0
    for _ in range(ctx.spec.trials):
        G = ctx.random_graph(min(ctx.spec.n, 6), n_min=2)
        p = 4
        layers = []
        for _ in range(3):
            q = ctx.rng.randint(1, 3)
            msgs = tuple(
                tuple(tuple(Fraction(ctx.rng.randint(-3, 3), ctx.rng.randint(1, 3))
                            for _ in range(p)) for _ in range(p))
                for _ in range(2))
            rows = tuple(
                tuple(Fraction(ctx.rng.randint(-3, 3), ctx.rng.randint(1, 3))
                      for _ in range(2 * p)) for _ in range(q))
            bias = tuple(Fraction(ctx.rng.randint(-1, 1)) for _ in range(q))
            layers.append(gnn.KgnnLayer(msgs, gnn.AffineStack(
                (gnn.AffineStage(rows, bias, "lsig"),))))
            p = q
        model = gnn.GnnModel(4, layers=tuple(layers))
        res = gnn.run_kgnn(model, G, 2)
        owl_run = owl(G, 2, t_max=3)
        t = min(3, owl_run.last_round)
        colouring = owl_run.colouring_at(t)
        by_colour: dict = {}
        for i, vs in enumerate(res.derived.tuples):
            by_colour.setdefault(colouring.colour(vs), set()).add(res.final[i])
        if any(len(v) > 1 for v in by_colour.values()):
            violations += 1
            ctx.counterexample(
                "random tuple network split an oblivious-2-WL class",
                {"graph": G},
                f"wlgnn verify --suite kgnn --seed {ctx.spec.seed}")
    ctx.check("owl2-refines-random-tuple-networks", violations == 0,
              f"{ctx.spec.trials} graphs, {violations} violations")

    mismatches = 0
    for _ in range(10):
        G = ctx.random_graph(5, n_min=2)
        model = constructions.build_kgnn_refiner(5, 2)
        res = gnn.run_kgnn(model, G, 2, rounds=3)
        owl_run = owl(G, 2, t_max=3)
        for t in range(4):
            ot = min(t, owl_run.last_round)
            feats: dict = {}
            for i, vs in enumerate(res.derived.tuples):
                feats.setdefault(res.history[t][i], set()).add(vs)
            cols: dict = {}
            colouring = owl_run.colouring_at(ot)
            for vs in colouring.keys():
                cols.setdefault(colouring.colour(vs), set()).add(vs)
            if (set(map(frozenset, feats.values()))
                    != set(map(frozenset, cols.values()))):
                mismatches += 1
                break
    ctx.check("constructive-tuple-network-reproduces-owl2", mismatches == 0,
              f"10 graphs, {mismatches} mismatches")


def _suite_rni_triangle(ctx: _Ctx) -> None:
    """The random-identifier triangle detector separates the two-triangle
    graph from the six-cycle with small empirical failure rate, and the
    output distribution is permutation-invariant."""
    model = constructions.build_rni_triangle_model()
    eps = Fraction(1, 4)
    report = gnn.expresses_query_check(
        model,
        lambda G: _triangle_vertices(G),
        [cycle(6), two_triangles()],
        eps, trials=ctx.spec.trials, seed=ctx.spec.seed)
    ok = report.delta_hat is not None and report.delta_hat < 0.05
    ctx.check("triangle-detector-delta", ok,
              f"delta_hat={report.delta_hat:.4f} over {ctx.spec.trials} seeds, "
              f"Wilson upper {report.delta_wilson_upper:.4f}, eps={float(eps)}")

    G = disjoint_union(cycle(3), cycle(4))
    rows = gnn.initial_features(G, 1, rni=gnn.RniSpec(1, seed=ctx.spec.seed))
    perm = list(range(G.n))
    ctx.rng.shuffle(perm)
    H = G.relabel(perm)
    rows_h: list = [None] * G.n
    for v in range(G.n):
        rows_h[perm[v]] = rows[v]
    out_g = gnn.run(model, G, padding_rows=rows).per_vertex
    out_h = gnn.run(model, H, padding_rows=rows_h).per_vertex
    same = all(out_g[v] == out_h[perm[v]] for v in range(G.n))
    ctx.check("equivariance-in-distribution", same,
              "permuted graph with permuted identifiers gives permuted outputs")


def _triangle_vertices(G: LabelledGraph) -> set[int]:
    out = set()
    for v in G.vertices:
        nbrs = G.neighbours(v)
        for i, a in enumerate(nbrs):
            if any(G.has_edge(a, b) for b in nbrs[i + 1:]):
                out.add(v)
                break
    return out


def _suite_srg_pair(ctx: _Ctx) -> None:
    """The two strongly regular (16,6,2,2) graphs: not isomorphic, yet
    2-WL cannot tell them apart."""
    rook, shri = rook4x4(), shrikhande()
    iso, _ = oracles.oracle_isomorphic(rook, shri)
    ctx.check("non-isomorphic", iso is False, "exhaustive backtracking search")
    for G, name in ((rook, "rook"), (shri, "shrikhande")):
        degs = set(G.degree(v) for v in G.vertices)
        ctx.check(f"{name}-is-6-regular-16-48", G.n == 16 and G.num_edges == 48
                  and degs == {6}, "")
    distinguished = pair_run(rook, shri, "wl", 2)
    verdict = distinguishes_graphs(*distinguished,
                                   min(r.last_round for r in distinguished))
    ctx.check("wl2-blind", verdict is False,
              "equal hat multisets at the joint fixed point")


def _suite_fastcr(ctx: _Ctx) -> None:
    """The partition-refinement kernel matches the naive engine and
    handles a hundred-thousand-vertex graph within budget."""
    mismatch = 0
    for _ in range(ctx.spec.trials):
        n = ctx.rng.randint(1, 64)
        G = gnp(n, ctx.rng.choice([0.05, 0.2, 0.5, 0.8]), ctx.rng.randrange(2**31))
        if ctx.rng.random() < 0.3:
            G = with_random_labels(G, ctx.rng.randint(1, 2), ctx.rng.randrange(2**31))
        part = fastcr.colour_refinement_fast(G)
        stable = colour_refinement(G).stable_colouring()
        by_fast: dict = {}
        for v, c in enumerate(part.labels):
            by_fast.setdefault(c, set()).add(v)
        by_naive: dict = {}
        for v in stable.keys():
            by_naive.setdefault(stable.colour(v), set()).add(v)
        if (set(map(frozenset, by_fast.values()))
                != set(map(frozenset, by_naive.values()))):
            mismatch += 1
            ctx.counterexample("fast partition differs from naive", {"graph": G},
                               f"wlgnn verify --suite fastcr --seed {ctx.spec.seed}")
    ctx.check("agrees-with-naive", mismatch == 0,
              f"{ctx.spec.trials} graphs up to 64 vertices, {mismatch} mismatches")

    G = gnm(100_000, 500_000, seed=ctx.spec.seed)
    G.adjacency  # build the adjacency index outside the timed region
    start = time.perf_counter()
    part = fastcr.colour_refinement_fast(G)
    elapsed = time.perf_counter() - start
    ctx.check("large-graph-under-5s", elapsed < 5.0,
              f"{elapsed:.2f}s, {part.num_classes} classes")


SUITES = {
    "cr1wl": _suite_cr1wl,
    "owl-sandwich": _suite_owl_sandwich,
    "lemma-owl": _suite_lemma_owl,
    "ag-equivalence": _suite_ag_equivalence,
    "sum-lemma": _suite_sum_lemma,
    "gnn-upper": _suite_gnn_upper,
    "gnn-lower": _suite_gnn_lower,
    "cr-logic-synth": _suite_cr_logic_synth,
    "compile-exact": _suite_compile_exact,
    "kgnn": _suite_kgnn,
    "rni-triangle": _suite_rni_triangle,
    "srg-pair": _suite_srg_pair,
    "fastcr": _suite_fastcr,
}

SUITE_DEFAULTS = {
    "cr1wl": (8, 1000),
    "owl-sandwich": (6, 500),
    "lemma-owl": (6, 500),
    "ag-equivalence": (6, 200),
    "sum-lemma": (4, 1000),
    "gnn-upper": (7, 100),
    "gnn-lower": (8, 300),
    "cr-logic-synth": (7, 500),
    "compile-exact": (9, 50),
    "kgnn": (6, 200),
    "rni-triangle": (6, 200),
    "srg-pair": (16, 1),
    "fastcr": (64, 200),
}

# what each suite mechanises, for the coverage manifest
SUITE_COVERS = {
    "cr1wl": "graph distinguishability of colour refinement equals 1-WL",
    "owl-sandwich": "wl_k => owl_(k+1) => wl_k(t+1) distinguishability sandwich",
    "lemma-owl": "owl_(k+1) equality iff atomic type plus wl_k deletion colours",
    "ag-equivalence": "oblivious 2-WL equals 1-WL on the derived tuple structure",
    "sum-lemma": "digit sums of bounded multisets: below-min and injective",
    "gnn-upper": "round-d refinement refines every d-layer network",
    "gnn-lower": "a recurrent digit network computes the refinement partitions",
    "cr-logic-synth": "guarded rank-t formulas characterise round-t refinement",
    "compile-exact": "compiled guarded formulas agree exactly with evaluation",
    "kgnn": "tuple networks are bounded by and reach oblivious 2-WL",
    "rni-triangle": "random identifiers let a network detect triangles whp",
    "srg-pair": "the (16,6,2,2) pair: non-isomorphic but 2-WL-equivalent",
    "fastcr": "worklist refinement matches the naive engine and scales",
}


def run_suite(spec: SuiteSpec) -> SuiteReport:
    spec = spec.resolved()
    if spec.suite not in SUITES:
        raise ValueError(f"unknown suite {spec.suite!r}; "
                         f"known: {', '.join(sorted(SUITES))}")
    ctx = _Ctx(spec)
    start = time.perf_counter()
    saved_budget = os.environ.get("WLGNN_BUDGET_TUPLES")
    if spec.budget is not None:
        os.environ["WLGNN_BUDGET_TUPLES"] = str(spec.budget)
    try:
        SUITES[spec.suite](ctx)
    except Exception as exc:  # budget overruns surface as explicit skips
        from .constructions import CapacityExhausted
        from .wl import BudgetExceeded
        if isinstance(exc, (BudgetExceeded, CapacityExhausted,
                            oracles.SizeCapExceeded)):
            ctx.skip("suite-budget", str(exc))
        else:
            raise
    finally:
        if spec.budget is not None:
            if saved_budget is None:
                os.environ.pop("WLGNN_BUDGET_TUPLES", None)
            else:
                os.environ["WLGNN_BUDGET_TUPLES"] = saved_budget
    ctx.report.timings["total"] = time.perf_counter() - start
    return ctx.report


def run_all(seed: int = 0) -> list[SuiteReport]:
    return [run_suite(SuiteSpec(suite, seed=seed)) for suite in SUITES]


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

def report_text(report: SuiteReport, include_timings: bool = True) -> str:
    lines = [f"suite {report.suite} (seed {report.seed}, n {report.n}, "
             f"trials {report.trials})"]
    for c in report.checks:
        lines.append(f"  [{c.status.upper():4}] {c.name}"
                     + (f" - {c.details}" if c.details else ""))
    lines.append(f"result: {'PASS' if report.passed else 'FAIL'}"
                 + (" (with skips)" if report.skipped else ""))
    if include_timings and report.timings:
        lines.append(f"time: {report.timings.get('total', 0.0):.2f}s")
    if report.counterexamples:
        lines.append(f"counterexamples: {len(report.counterexamples)}")
    return "\n".join(lines) + "\n"


def report_emit(report: SuiteReport, fmt: str = "text",
                path: str | None = None,
                include_timings: bool = True) -> str:
    if fmt == "text":
        payload = report_text(report, include_timings)
    elif fmt == "json":
        payload = json.dumps(report.to_dict(include_timings), indent=1,
                             sort_keys=True) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(payload)
        directory = os.path.dirname(os.path.abspath(path))
        for i, ce in enumerate(report.counterexamples):
            for name, text in ce["graphs"].items():
                ce_path = os.path.join(
                    directory, f"{report.suite}-counterexample-{i}-{name}.gr")
                with open(ce_path, "w", encoding="utf-8") as f:
                    f.write(text)
    return payload
