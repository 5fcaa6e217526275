"""Weisfeiler-Leman refinement, counting-logic model checking,
message-passing network simulation, and the constructive bridges
between them, with an executable verification harness."""

from .graphs import (BinaryStructure, LabelledGraph, atomic_type, complete,
                     cycle, disjoint_union, figure1_pair, gnp, rook4x4,
                     shrikhande, star, two_triangles, with_random_labels)
from .gio import GraphParseError, load_graph, read_graph, save_graph, write_graph
from .colouring import (Colouring, ColourInterner, default_interner,
                        equivalent, hat_invariant, refines)
from .multiset import Multiset
from .wl import (BudgetExceeded, DerivedStructure, WlRun, colour_refinement,
                 compare_graphs, compare_vertices, derived_structure,
                 distinguishes_graphs, distinguishes_vertices, owl, pair_run,
                 refine, wl)
from .fastcr import (FastPartition, colour_refinement_fast,
                     colour_refinement_fast_pair)
from .logic import (Formula, FragmentReport, evaluate, evaluate_unary,
                    fragment_check, format_formula, parse_formula)
from .synth import synthesize_distinguishing_formula
from .gnn import (AffineStack, AffineStage, ExpressesReport, GnnLayer,
                  GnnModel, KgnnLayer, OracleTable, RniSpec,
                  expresses_query_check, initial_features, load_model,
                  model_from_json, model_to_json, run, run_kgnn, save_model)
from .constructions import (SumEncoder, build_kgnn_refiner,
                            build_rni_triangle_model, build_sum_encoder,
                            build_wl1_gnn, build_wl_gnn)
from .compiler import CompiledGnn, certify, compile_formula, plan
from .oracles import automorphism_orbits, is_isomorphism, oracle_isomorphic

__version__ = "0.1.0"
