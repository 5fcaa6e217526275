"""Execution engine for aggregate-combine message-passing networks.

A layer turns a feature map into a new one by

    new(v) = comb(old(v), sum of old(w) over neighbours w)

optionally extended by the sum over *all* vertices (global readout; the
global sum includes v itself).  Aggregation is always summation.  The
combination function is either a stack of affine maps with pointwise
activations or an exact input/output table (an "oracle"), so the engine
can run both ordinary weight-based networks and the table-driven
constructions used for refinement simulation.

Two numeric modes: exact rationals (ints, ``fractions.Fraction``, and
:class:`wlgnn.numeric.DigitFraction` mix freely) and float64.  In float
mode, multiset sums are accumulated in sorted order so that equal input
multisets produce bitwise-equal outputs.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import LabelledGraph
from .numeric import DigitFraction, canonical_vector, format_rational, parse_rational
from .wl import DerivedStructure, derived_structure

RATIONAL = "rational"
FLOAT64 = "float64"


class OracleMiss(KeyError):
    pass


class DimensionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Activations
# ---------------------------------------------------------------------------

def _lsig_exact(x):
    if x <= 0:
        return 0
    if x >= 1:
        return 1
    return x


def _relu_exact(x):
    return x if x > 0 else 0


_EXACT_ACTIVATIONS = {
    "lsig": _lsig_exact,
    "relu": _relu_exact,
    "identity": lambda x: x,
}

_FLOAT_ACTIVATIONS = {
    "lsig": lambda x: min(max(x, 0.0), 1.0),
    "relu": lambda x: max(x, 0.0),
    "identity": lambda x: x,
    "sig": lambda x: 1.0 / (1.0 + math.exp(-x)),
    "tanh": math.tanh,
}


def apply_activation(name: str, x, mode: str):
    if mode == RATIONAL:
        fn = _EXACT_ACTIVATIONS.get(name)
        if fn is None:
            raise ValueError(f"activation {name!r} has no exact rational form")
        return fn(x)
    fn = _FLOAT_ACTIVATIONS.get(name)
    if fn is None:
        raise ValueError(f"unknown activation {name!r}")
    return fn(x)


# ---------------------------------------------------------------------------
# Combination functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineStage:
    matrix: tuple[tuple, ...]  # rows x cols
    bias: tuple
    activation: str = "identity"

    @property
    def out_dim(self) -> int:
        return len(self.bias)

    @property
    def in_dim(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0


@dataclass(frozen=True)
class AffineStack:
    """comb as a chain of sigma(A x + b) maps."""

    stages: tuple[AffineStage, ...]

    def __post_init__(self):
        for prev, nxt in zip(self.stages, self.stages[1:]):
            if prev.out_dim != nxt.in_dim:
                raise DimensionError("affine stage dimensions do not chain")

    def apply(self, vec: tuple, mode: str) -> tuple:
        x = list(vec)
        if mode == RATIONAL:
            x = [v.to_fraction() if isinstance(v, DigitFraction) else v for v in x]
        for stage in self.stages:
            if stage.matrix and len(x) != stage.in_dim:
                raise DimensionError(
                    f"affine stage expects {stage.in_dim} inputs, got {len(x)}")
            y = []
            for row, b in zip(stage.matrix, stage.bias):
                acc = b
                for a, v in zip(row, x):
                    if a:
                        acc = acc + a * v
                y.append(apply_activation(stage.activation, acc, mode))
            if not stage.matrix:
                y = [apply_activation(stage.activation, b, mode) for b in stage.bias]
            x = y
        return tuple(x)


class DynamicOracle:
    """A computed combination rule with serialisable state.

    Subclasses provide ``kind``, ``compute(vec)`` and params round-trip;
    they may override ``canonical_key`` when inputs need normalising
    before lookup.
    """

    kind = ""

    def compute(self, vec: tuple) -> tuple:
        raise NotImplementedError

    def canonical_key(self, vec: tuple) -> tuple:
        return canonical_vector(vec)

    def to_params(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_params(cls, params: dict) -> "DynamicOracle":
        raise NotImplementedError


DYNAMIC_ORACLE_KINDS: dict[str, type[DynamicOracle]] = {}


def register_dynamic_oracle(cls: type[DynamicOracle]) -> type[DynamicOracle]:
    DYNAMIC_ORACLE_KINDS[cls.kind] = cls
    return cls


@dataclass
class OracleTable:
    """comb as an exact table from input vectors to output vectors.

    Lookup order: explicit entries, then the dynamic rule (if any), then
    the default; a miss with no fallback raises :class:`OracleMiss`.
    """

    entries: dict = field(default_factory=dict)
    default: tuple | None = None
    dynamic: DynamicOracle | None = None

    def apply(self, vec: tuple, mode: str) -> tuple:
        key = (self.dynamic.canonical_key(vec) if self.dynamic
               else canonical_vector(vec))
        hit = self.entries.get(key)
        if hit is not None:
            return hit
        if self.dynamic is not None:
            return self.dynamic.compute(key)
        if self.default is not None:
            return self.default
        raise OracleMiss(f"no oracle entry for {key!r}")


CombFunction = AffineStack | OracleTable


# ---------------------------------------------------------------------------
# Layers and models
# ---------------------------------------------------------------------------

@dataclass
class GnnLayer:
    comb: CombFunction
    global_readout: bool = False


@dataclass
class KgnnLayer:
    """A layer over a binary structure: per-relation message matrices are
    applied to the per-relation neighbour sums, then summed into one
    aggregated vector handed to comb."""

    messages: tuple[tuple[tuple, ...], ...]
    comb: CombFunction


@dataclass
class GnnModel:
    input_dim: int
    layers: tuple = ()
    recurrent: GnnLayer | KgnnLayer | None = None
    iter_policy: int | str = "n"
    readout: CombFunction | None = None
    aggregate_readout: CombFunction | None = None
    numeric_mode: str = RATIONAL
    rni_padding: int = 0
    input_encoder: CombFunction | None = None

    def __post_init__(self):
        if self.layers and self.recurrent is not None:
            raise ValueError("model is either layered or recurrent, not both")
        if self.numeric_mode not in (RATIONAL, FLOAT64):
            raise ValueError(f"unknown numeric mode {self.numeric_mode!r}")
        if isinstance(self.iter_policy, str) and self.iter_policy != "n":
            raise ValueError("iter_policy is an int or 'n'")


@dataclass(frozen=True)
class RniSpec:
    count: int
    seed: int


def _zero(mode: str):
    return 0.0 if mode == FLOAT64 else 0


def _lift(x: int, mode: str):
    return float(x) if mode == FLOAT64 else x


def vector_sum(vectors: list[tuple], dim: int, mode: str) -> tuple:
    """Sum of a multiset of vectors; empty sum is the zero vector.

    Float mode sorts the summands first, so equal multisets give
    bitwise-equal sums regardless of vertex order.
    """
    if not vectors:
        return (_zero(mode),) * dim
    if mode == FLOAT64:
        vectors = sorted(vectors)
    acc = list(vectors[0])
    for vec in vectors[1:]:
        for i, v in enumerate(vec):
            acc[i] = acc[i] + v
    return tuple(acc)


def initial_features(G: LabelledGraph, q0: int, mode: str = RATIONAL,
                     rni: RniSpec | None = None,
                     padding_rows: list[tuple] | None = None) -> list[tuple]:
    """Label bits in the first coordinates, zeros after; with random node
    initialisation, the coordinates after the labels get fresh uniform
    draws from [0, 1) (64-bit dyadics in rational mode)."""
    ell = G.num_labels
    if q0 < ell:
        raise ValueError(f"input dimension {q0} below label count {ell}")
    rows = []
    if rni is not None and padding_rows is not None:
        raise ValueError("pass either rni or explicit padding rows")
    if rni is not None:
        if rni.count > q0 - ell:
            raise ValueError("rni padding exceeds the free coordinates")
        rng = random.Random(rni.seed)
        for _ in range(G.n):
            row = []
            for _ in range(rni.count):
                a = rng.getrandbits(64)
                row.append(a / 2**64 if mode == FLOAT64 else Fraction(a, 2**64))
            rows.append(tuple(row))
    elif padding_rows is not None:
        if len(padding_rows) != G.n:
            raise ValueError("need one padding row per vertex")
        if any(len(r) > q0 - ell for r in padding_rows):
            raise ValueError("padding rows exceed the free coordinates")
        rows = [tuple(r) for r in padding_rows]

    feats = []
    for v in range(G.n):
        base = [_lift(b, mode) for b in G.label_bits(v)]
        pad = list(rows[v]) if rows else []
        rest = [_zero(mode)] * (q0 - ell - len(pad))
        feats.append(tuple(base + pad + rest))
    return feats


def apply_layer(layer: GnnLayer, G: LabelledGraph, feats: list[tuple],
                mode: str) -> list[tuple]:
    """One aggregate-combine step over the whole graph."""
    p = len(feats[0]) if feats else 0
    total = None
    if layer.global_readout:
        total = vector_sum(feats, p, mode)
    out = []
    for v in range(G.n):
        nbr = vector_sum([feats[w] for w in G.neighbours(v)], p, mode)
        vec = feats[v] + nbr + (total if total is not None else ())
        out.append(layer.comb.apply(vec, mode))
    return out


def apply_kgnn_layer(layer: KgnnLayer, A: DerivedStructure | object,
                     feats: list[tuple], mode: str) -> list[tuple]:
    structure = A.structure if isinstance(A, DerivedStructure) else A
    p = len(feats[0]) if feats else 0
    out = []
    for v in range(structure.n):
        agg = [_zero(mode)] * p
        for i, matrix in enumerate(layer.messages):
            nbr = vector_sum(
                [feats[w] for w in structure.out_adjacency[i][v]], p, mode)
            for r, row in enumerate(matrix):
                acc = _zero(mode)
                for a, x in zip(row, nbr):
                    if a:
                        acc = acc + a * x
                agg[r] = agg[r] + acc
        vec = feats[v] + tuple(agg)
        out.append(layer.comb.apply(vec, mode))
    return out


@dataclass
class GnnRunResult:
    history: list[list[tuple]]
    final: list[tuple]
    per_vertex: list[tuple]
    graph_output: tuple | None


def run(model: GnnModel, G: LabelledGraph, seed: int | None = None,
        features: list[tuple] | None = None,
        padding_rows: list[tuple] | None = None,
        rounds: int | None = None) -> GnnRunResult:
    """Execute a model on a graph.

    ``rounds`` overrides the iteration policy of a recurrent model;
    ``features`` bypasses initial-feature construction entirely.
    ``history[t]`` holds the features after t layers / iterations
    (after the input encoder, when the model has one).
    """
    mode = model.numeric_mode
    if features is None:
        rni = None
        if model.rni_padding and padding_rows is None:
            if seed is None:
                raise ValueError("model with random initialisation needs a seed")
            rni = RniSpec(model.rni_padding, seed)
        features = initial_features(G, model.input_dim, mode, rni, padding_rows)
    feats = list(features)
    if model.input_encoder is not None:
        feats = [model.input_encoder.apply(f, mode) for f in feats]

    history = [feats]
    if model.recurrent is not None:
        if rounds is None:
            rounds = model.iter_policy if isinstance(model.iter_policy, int) else G.n
        for _ in range(rounds):
            feats = apply_layer(model.recurrent, G, feats, mode)
            history.append(feats)
    else:
        if rounds is not None:
            raise ValueError("rounds only applies to recurrent models")
        for layer in model.layers:
            feats = apply_layer(layer, G, feats, mode)
            history.append(feats)

    per_vertex = ([model.readout.apply(f, mode) for f in feats]
                  if model.readout is not None else list(feats))
    graph_output = None
    if model.aggregate_readout is not None:
        p = len(feats[0]) if feats else 0
        graph_output = model.aggregate_readout.apply(
            vector_sum(feats, p, mode), mode)
    return GnnRunResult(history, feats, per_vertex, graph_output)


@dataclass
class KgnnRunResult:
    derived: DerivedStructure
    history: list[list[tuple]]
    final: list[tuple]
    per_tuple: dict


def run_kgnn(model: GnnModel, G: LabelledGraph, k: int,
             rounds: int | None = None, budget: int | None = None) -> KgnnRunResult:
    """Execute a higher-order model: an ordinary run over the derived
    structure on V(G)^k, with per-relation messages and one-hot atomic
    types as initial features."""
    mode = model.numeric_mode
    A = derived_structure(G, k, budget)
    num_types = A.structure.num_labels
    if model.input_dim != num_types:
        raise DimensionError(
            f"model input dim {model.input_dim} != {num_types} atomic types")
    feats = []
    for idx in range(A.structure.n):
        row = [_lift(A.structure.labels[j][idx], mode) for j in range(num_types)]
        feats.append(tuple(row))
    if model.input_encoder is not None:
        feats = [model.input_encoder.apply(f, mode) for f in feats]

    history = [feats]
    if model.recurrent is not None:
        if rounds is None:
            rounds = model.iter_policy if isinstance(model.iter_policy, int) else G.n
        for _ in range(rounds):
            feats = apply_kgnn_layer(model.recurrent, A, feats, mode)
            history.append(feats)
    else:
        for layer in model.layers:
            feats = apply_kgnn_layer(layer, A, feats, mode)
            history.append(feats)

    final = ([model.readout.apply(f, mode) for f in feats]
             if model.readout is not None else list(feats))
    per_tuple = {vs: final[i] for i, vs in enumerate(A.tuples)}
    return KgnnRunResult(A, history, feats, per_tuple)


# ---------------------------------------------------------------------------
# Query expression checks
# ---------------------------------------------------------------------------

def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = phat + z * z / (2 * trials)
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return ((centre - half) / denom, (centre + half) / denom)


@dataclass
class ExpressesReport:
    ok: bool
    eps: float
    margins: list  # (graph index, vertex, value or frequency, in_query, ok)
    delta_hat: float | None = None
    delta_wilson_upper: float | None = None


def _scalar(out: tuple):
    if len(out) != 1:
        raise DimensionError("query check needs one-dimensional outputs")
    return out[0]


def expresses_query_check(model: GnnModel, query, graphs: list[LabelledGraph],
                          eps, trials: int | None = None,
                          seed: int = 0) -> ExpressesReport:
    """Check the two-sided output margins of a unary query.

    Vertices in the query must land at or above 1 - eps, the rest at or
    below eps.  With ``trials``, the model is run with that many fresh
    random initialisations and the report carries the empirical
    worst-vertex failure rate (delta_hat) with a Wilson upper bound.
    """
    if not 0 <= float(eps) < 0.5:
        raise ValueError("eps must lie in [0, 1/2)")
    margins = []
    if trials is None:
        ok = True
        for gi, G in enumerate(graphs):
            positives = set(query(G))
            res = run(model, G)
            for v in range(G.n):
                val = _scalar(res.per_vertex[v])
                inq = v in positives
                good = (val >= 1 - eps) if inq else (val <= eps)
                ok = ok and good
                margins.append((gi, v, val, inq, good))
        return ExpressesReport(ok, float(eps), margins)

    failures: dict[tuple[int, int], int] = {}
    for t in range(trials):
        for gi, G in enumerate(graphs):
            positives = set(query(G))
            res = run(model, G, seed=seed + 1_000_003 * t + gi)
            for v in range(G.n):
                val = _scalar(res.per_vertex[v])
                inq = v in positives
                good = (val >= 1 - eps) if inq else (val <= eps)
                if not good:
                    failures[(gi, v)] = failures.get((gi, v), 0) + 1
    delta_hat = 0.0
    worst_fail = 0
    for gi, G in enumerate(graphs):
        positives = set(query(G))
        for v in range(G.n):
            nfail = failures.get((gi, v), 0)
            rate = nfail / trials
            worst_fail = max(worst_fail, nfail)
            delta_hat = max(delta_hat, rate)
            margins.append((gi, v, rate, v in positives, rate < 0.5))
    upper = wilson_interval(trials - worst_fail, trials)[0]
    return ExpressesReport(delta_hat < 0.5, float(eps), margins,
                           delta_hat=delta_hat, delta_wilson_upper=1 - upper)


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------

def _num_to_json(x, mode: str):
    if mode == FLOAT64:
        return float(x)
    return format_rational(x)


def _num_from_json(x, mode: str):
    if mode == FLOAT64:
        return float(x)
    return parse_rational(x)


def _comb_to_json(comb: CombFunction, mode: str) -> dict:
    if isinstance(comb, AffineStack):
        return {
            "kind": "affine",
            "stages": [
                {
                    "A": [[_num_to_json(a, mode) for a in row] for row in st.matrix],
                    "b": [_num_to_json(b, mode) for b in st.bias],
                    "activation": st.activation,
                }
                for st in comb.stages
            ],
        }
    if isinstance(comb, OracleTable):
        out: dict = {"kind": "oracle"}
        if comb.entries:
            out["entries"] = [
                {
                    "in": [_num_to_json(x, mode) for x in key],
                    "out": [_num_to_json(x, mode) for x in val],
                }
                for key, val in sorted(comb.entries.items(), key=repr)
            ]
        if comb.default is not None:
            out["default"] = [_num_to_json(x, mode) for x in comb.default]
        if comb.dynamic is not None:
            out["dynamic"] = {"kind": comb.dynamic.kind,
                              "params": comb.dynamic.to_params()}
        return out
    raise TypeError(f"not a combination function: {comb!r}")


def _comb_from_json(data: dict, mode: str) -> CombFunction:
    if data["kind"] == "affine":
        stages = tuple(
            AffineStage(
                tuple(tuple(_num_from_json(a, mode) for a in row) for row in st["A"]),
                tuple(_num_from_json(b, mode) for b in st["b"]),
                st.get("activation", "identity"),
            )
            for st in data["stages"]
        )
        return AffineStack(stages)
    if data["kind"] == "oracle":
        from . import constructions  # noqa: F401  (registers dynamic kinds)
        entries = {}
        for e in data.get("entries", ()):
            key = canonical_vector(tuple(_num_from_json(x, mode) for x in e["in"]))
            entries[key] = tuple(_num_from_json(x, mode) for x in e["out"])
        default = (tuple(_num_from_json(x, mode) for x in data["default"])
                   if "default" in data else None)
        dynamic = None
        if "dynamic" in data:
            kind = data["dynamic"]["kind"]
            cls = DYNAMIC_ORACLE_KINDS.get(kind)
            if cls is None:
                raise ValueError(f"unknown dynamic oracle kind {kind!r}")
            dynamic = cls.from_params(data["dynamic"]["params"])
        return OracleTable(entries, default, dynamic)
    raise ValueError(f"unknown comb kind {data['kind']!r}")


def _layer_to_json(layer, mode: str) -> dict:
    if isinstance(layer, KgnnLayer):
        return {
            "messages": [
                [[_num_to_json(a, mode) for a in row] for row in matrix]
                for matrix in layer.messages
            ],
            "comb": _comb_to_json(layer.comb, mode),
        }
    return {"comb": _comb_to_json(layer.comb, mode),
            "globalReadout": layer.global_readout}


def _layer_from_json(data: dict, mode: str):
    if "messages" in data:
        messages = tuple(
            tuple(tuple(_num_from_json(a, mode) for a in row) for row in matrix)
            for matrix in data["messages"]
        )
        return KgnnLayer(messages, _comb_from_json(data["comb"], mode))
    return GnnLayer(_comb_from_json(data["comb"], mode),
                    data.get("globalReadout", False))


def model_to_json(model: GnnModel) -> dict:
    mode = model.numeric_mode
    out: dict = {
        "inputDim": model.input_dim,
        "numericMode": mode,
        "rniPadding": model.rni_padding,
        "iterPolicy": model.iter_policy,
        "readout": ("identity" if model.readout is None
                    else _comb_to_json(model.readout, mode)),
    }
    if model.recurrent is not None:
        out["recurrent"] = _layer_to_json(model.recurrent, mode)
    else:
        out["layers"] = [_layer_to_json(layer, mode) for layer in model.layers]
    if model.aggregate_readout is not None:
        out["aggregateReadout"] = _comb_to_json(model.aggregate_readout, mode)
    if model.input_encoder is not None:
        out["inputEncoder"] = _comb_to_json(model.input_encoder, mode)
    return out


def model_from_json(data: dict) -> GnnModel:
    mode = data.get("numericMode", RATIONAL)
    readout = data.get("readout", "identity")
    return GnnModel(
        input_dim=data["inputDim"],
        layers=tuple(_layer_from_json(ld, mode) for ld in data.get("layers", ())),
        recurrent=(_layer_from_json(data["recurrent"], mode)
                   if "recurrent" in data else None),
        iter_policy=data.get("iterPolicy", "n"),
        readout=None if readout == "identity" else _comb_from_json(readout, mode),
        aggregate_readout=(_comb_from_json(data["aggregateReadout"], mode)
                           if "aggregateReadout" in data else None),
        numeric_mode=mode,
        rni_padding=data.get("rniPadding", 0),
        input_encoder=(_comb_from_json(data["inputEncoder"], mode)
                       if "inputEncoder" in data else None),
    )


def save_model(model: GnnModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_json(model), f, indent=1)
        f.write("\n")


def load_model(path: str) -> GnnModel:
    with open(path, "r", encoding="utf-8") as f:
        return model_from_json(json.load(f))
