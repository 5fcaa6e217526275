"""Command-line interface.

Subcommands: the refinement algorithms (cr, wl, owl), logic evaluation
and formula synthesis, the guarded-formula compiler, constructive model
builders, model execution, and the verification suites.  Reports are
deterministic given their seeds; verify can render figures next to its
output file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import constructions, suites
from .compiler import certify, compile_formula
from .gio import load_graph, save_graph
from .gnn import RniSpec, initial_features, load_model, run, save_model
from .logic import evaluate, format_formula, formula_size, fragment_check, parse_formula
from .numeric import format_rational
from .synth import synthesize_distinguishing_formula
from .wl import refine


def _fmt_value(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return format_rational(x)


def _refinement_report(run_obj, emit: str) -> str:
    lines = []
    for t in range(run_obj.last_round + 1):
        lines.append(f"round {t}: {run_obj.colouring_at(t).num_classes()} classes")
    if run_obj.t_inf is not None:
        lines.append(f"stable at round {run_obj.t_inf}")

    def class_lines(colouring):
        out = []
        for cid in sorted(colouring.classes()):
            keys = colouring.classes()[cid]
            if run_obj.k == 1:
                body = " ".join(str(v + 1) for v in sorted(keys))
            else:
                body = " ".join("(" + ",".join(str(v + 1) for v in key) + ")"
                                for key in sorted(keys))
            out.append(f"class {cid}: {body}")
        return out

    if emit == "partition":
        lines.extend(class_lines(run_obj.colourings[-1]))
    elif emit == "trace":
        for t in range(run_obj.last_round + 1):
            lines.append(f"-- round {t}")
            lines.extend(class_lines(run_obj.colouring_at(t)))
    elif emit == "hat":
        from .colouring import hat_invariant
        hat = hat_invariant(run_obj.colourings[-1])
        for cid, count in hat.as_sorted_tuple():
            lines.append(f"colour {cid}: {count}")
    else:
        raise SystemExit(f"unknown emit mode {emit!r}")
    return "\n".join(lines) + "\n"


def _cmd_refine(args) -> int:
    G = load_graph(args.graph)
    t_max = None if args.rounds == "auto" else int(args.rounds)
    run_obj = refine(G, args.algorithm, k=args.k, t_max=t_max)
    sys.stdout.write(_refinement_report(run_obj, args.emit))
    if args.plot:
        from .plots import plot_refinement_curve
        plot_refinement_curve([(os.path.basename(args.graph), run_obj)], args.plot)
        print(f"figure written to {args.plot}")
    return 0


def _cmd_logic_eval(args) -> int:
    with open(args.formula, "r", encoding="utf-8") as f:
        phi = parse_formula(f.read())
    G = load_graph(args.graph)
    assignment = {}
    if args.assign:
        for part in args.assign.split(","):
            var, _, value = part.partition("=")
            assignment[var.strip()] = int(value) - 1  # 1-based in files
    report = fragment_check(phi)
    print(f"variables: {report.variable_count}, rank: {report.quantifier_rank}, "
          f"guarded: {report.is_guarded}")
    free = sorted(phi.free_vars())
    if not free:
        print("true" if evaluate(phi, G, assignment) else "false")
        return 0
    if assignment:
        print("true" if evaluate(phi, G, assignment) else "false")
        return 0
    if len(free) == 1:
        for v in G.vertices:
            verdict = evaluate(phi, G, {free[0]: v})
            print(f"{free[0]}={v + 1}: {'true' if verdict else 'false'}")
        return 0
    raise SystemExit("formula has several free variables; pass --assign")


def _cmd_logic_synth(args) -> int:
    G = load_graph(args.graph)
    H = load_graph(args.other_graph)
    phi = synthesize_distinguishing_formula(
        G, args.vertex - 1, H, args.other_vertex - 1, args.rounds)
    if phi is None:
        print("not-distinguished")
        return 2
    text = format_formula(phi)
    report = fragment_check(phi)
    print(f"size: {formula_size(phi)} nodes, rank: {report.quantifier_rank}, "
          f"variables: {report.variable_count}, guarded: {report.is_guarded}")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        print(f"formula written to {args.output}")
    else:
        print(text)
    return 0


def _cmd_compile(args) -> int:
    with open(args.formula, "r", encoding="utf-8") as f:
        phi = parse_formula(f.read())
    compiled = compile_formula(phi, args.labels)
    save_model(compiled.model, args.output)
    print(f"compiled {len(compiled.model.layers)} layers "
          f"({len(compiled.plan.ops)} plan entries) to {args.output}")
    if args.certify:
        corpus = []
        for name in sorted(os.listdir(args.certify)):
            if name.endswith(".gr"):
                corpus.append(load_graph(os.path.join(args.certify, name)))
        report = certify(compiled, corpus)
        status = "vacuous-pass" if report.vacuous else (
            "pass" if report.ok else "fail")
        print(f"certification over {report.graphs_checked} graphs: {status}")
        if not report.ok:
            print(f"first counterexample: {report.first_counterexample()}")
            return 1
    return 0


def _cmd_build(args) -> int:
    if args.kind != "wl-gnn":
        raise SystemExit(f"unknown builder {args.kind!r}")
    if args.global_readout:
        model = constructions.build_wl1_gnn(args.n, args.labels, args.capacity)
    else:
        model = constructions.build_wl_gnn(args.n, args.labels, args.capacity)
    save_model(model, args.output)
    print(f"model written to {args.output}")
    return 0


def _cmd_gnn_run(args) -> int:
    model = load_model(args.model)
    G = load_graph(args.graph)
    if args.trials:
        if not model.rni_padding:
            raise SystemExit("--trials needs a model with random initialisation")
        counts = [0] * G.n
        for t in range(args.trials):
            res = run(model, G, seed=(args.seed or 0) + t)
            for v in G.vertices:
                if res.per_vertex[v][0] >= 1:
                    counts[v] += 1
        for v in G.vertices:
            print(f"vertex {v + 1}: {counts[v] / args.trials:.3f}")
        return 0
    res = run(model, G, seed=args.seed, rounds=args.rounds)
    for v in G.vertices:
        body = " ".join(_fmt_value(x) for x in res.per_vertex[v])
        print(f"vertex {v + 1}: {body}")
    if res.graph_output is not None:
        print("graph: " + " ".join(_fmt_value(x) for x in res.graph_output))
    return 0


def _cmd_verify(args) -> int:
    if args.all:
        names = list(suites.SUITES)
    elif args.suite:
        names = [args.suite]
    else:
        raise SystemExit("pass --suite ID or --all")
    reports = []
    for name in names:
        spec = suites.SuiteSpec(name, n=args.n, trials=args.trials,
                                seed=args.seed, budget=args.budget)
        report = suites.run_suite(spec)
        reports.append(report)
        payload = suites.report_emit(report, args.emit, None)
        sys.stdout.write(payload)

    out_dir = None
    if args.output:
        out_dir = os.path.dirname(os.path.abspath(args.output)) or "."
        os.makedirs(out_dir, exist_ok=True)
        with open(args.output, "w", encoding="utf-8") as f:
            for report in reports:
                f.write(suites.report_emit(report, args.emit, None))
        for report in reports:
            suites.report_emit(report, args.emit,
                               os.path.join(out_dir, f"{report.suite}.report"))
    if args.figures or out_dir:
        fig_dir = args.figures or out_dir
        os.makedirs(fig_dir, exist_ok=True)
        from .plots import plot_suite_summary
        path = plot_suite_summary(reports, os.path.join(fig_dir, "suites.png"))
        print(f"figure written to {path}")

    if any(not r.passed for r in reports):
        return 1
    if any(r.skipped for r in reports):
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wlgnn",
        description="Refinement algorithms, counting-logic tools, "
                    "message-passing network simulation, and verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)

    for algo in ("cr", "wl", "owl"):
        p = sub.add_parser(algo, help=f"run {algo} refinement on a graph file")
        p.add_argument("--graph", required=True)
        p.add_argument("-k", type=int, default=1 if algo == "cr" else 2)
        p.add_argument("--rounds", default="auto", help="round bound or 'auto'")
        p.add_argument("--emit", default="partition",
                       choices=["partition", "trace", "hat"])
        p.add_argument("--plot", help="write a classes-per-round figure (PNG)")
        p.set_defaults(func=_cmd_refine, algorithm=algo)

    logic_p = sub.add_parser("logic", help="evaluate or synthesise formulas")
    logic_sub = logic_p.add_subparsers(dest="logic_command", required=True)
    ev = logic_sub.add_parser("eval")
    ev.add_argument("-f", "--formula", required=True)
    ev.add_argument("-g", "--graph", required=True)
    ev.add_argument("--assign", help="comma-separated var=vertex (1-based)")
    ev.set_defaults(func=_cmd_logic_eval)
    sy = logic_sub.add_parser("synth")
    sy.add_argument("-g", "--graph", required=True)
    sy.add_argument("-v", "--vertex", type=int, required=True,
                    help="vertex in the first graph (1-based)")
    sy.add_argument("-G", "--other-graph", required=True)
    sy.add_argument("-V", "--other-vertex", type=int, required=True)
    sy.add_argument("-t", "--rounds", type=int, required=True)
    sy.add_argument("-o", "--output")
    sy.set_defaults(func=_cmd_logic_synth)

    cp = sub.add_parser("compile", help="compile a guarded formula to a model")
    cp.add_argument("-f", "--formula", required=True)
    cp.add_argument("-o", "--output", required=True)
    cp.add_argument("--labels", type=int, default=2,
                    help="number of unary labels the model expects")
    cp.add_argument("--certify", help="directory of .gr graphs to certify against")
    cp.set_defaults(func=_cmd_compile)

    bp = sub.add_parser("build", help="emit a constructive model")
    bp.add_argument("kind", choices=["wl-gnn"])
    bp.add_argument("-n", type=int, required=True, help="graph order bound")
    bp.add_argument("--labels", type=int, default=0)
    bp.add_argument("--global-readout", action="store_true")
    bp.add_argument("--capacity", type=int, default=256)
    bp.add_argument("-o", "--output", required=True)
    bp.set_defaults(func=_cmd_build)

    gp = sub.add_parser("gnn", help="execute models")
    gnn_sub = gp.add_subparsers(dest="gnn_command", required=True)
    gr = gnn_sub.add_parser("run")
    gr.add_argument("--model", required=True)
    gr.add_argument("--graph", required=True)
    gr.add_argument("--seed", type=int)
    gr.add_argument("--trials", type=int)
    gr.add_argument("--rounds", type=int)
    gr.set_defaults(func=_cmd_gnn_run)

    vp = sub.add_parser("verify", help="run verification suites")
    vp.add_argument("--suite", choices=sorted(suites.SUITES))
    vp.add_argument("--all", action="store_true")
    vp.add_argument("--n", type=int)
    vp.add_argument("--trials", type=int)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--budget", type=int,
                    help="tuple budget (also via WLGNN_BUDGET_TUPLES)")
    vp.add_argument("--emit", default="text", choices=["text", "json"])
    vp.add_argument("-o", "--output", help="report file; figures go alongside")
    vp.add_argument("--figures", help="directory for figures")
    vp.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
