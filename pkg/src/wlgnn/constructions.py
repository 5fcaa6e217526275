"""Constructive network builders based on injective multiset sums.

The core device: given a finite value set X in (0, 1) and a bound m on
multiset order, map the i-th element of X to m**(-k-i) where k is the
smallest integer with m**(-k) <= min X.  Sums over multisets of order at
most m-1 are then base-m digit strings: they stay strictly below min X
and are distinct for distinct multisets.  Iterating this per round, with
the self-value entering once and each neighbour value twice (odd versus
even multiplicity), one recurrent layer reproduces the colour-refinement
partitions of every graph up to a chosen order bound.  A second,
wider-stride channel for the all-vertex sum upgrades the construction to
the power of 1-WL, and per-relation channels over the derived tuple
structure to oblivious k-WL.

Per-round value tables are materialised lazily: indices are assigned in
encounter order within a fixed per-round capacity, and round r+1 digits
live strictly below round r's digit block, so cross-round value
collisions are impossible regardless of which elements appear.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .gnn import (DynamicOracle, GnnLayer, GnnModel, KgnnLayer, OracleTable,
                  RATIONAL, register_dynamic_oracle)
from .numeric import DigitFraction


class CapacityExhausted(RuntimeError):
    pass


def _ceil_log(base: int, x: int) -> int:
    """Smallest k >= 0 with base**k >= x."""
    k = 0
    v = 1
    while v < x:
        v *= base
        k += 1
    return k


# ---------------------------------------------------------------------------
# The standalone injective multiset encoder
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SumEncoder:
    """f(x_i) = m**(-offset-i) over an enumerated X, injective on sums of
    multisets of order < m."""

    m: int
    offset: int
    values: tuple[Fraction, ...]

    def index(self, x) -> int:
        return self.values.index(x) + 1

    def f(self, x) -> Fraction:
        return Fraction(1, self.m ** (self.offset + self.index(x)))

    def encode(self, multiset) -> Fraction:
        total = Fraction(0)
        count = 0
        for x in multiset:
            total += self.f(x)
            count += 1
        if count > self.m - 1:
            raise ValueError(f"multiset order {count} exceeds m-1 = {self.m - 1}")
        return total


def build_sum_encoder(m: int, X) -> SumEncoder:
    """Encoder for the given value set, with the smallest valid offset.

    X is an ordered collection of rationals in the open unit interval;
    the enumeration order is the (deduplicated) input order.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    values: list[Fraction] = []
    for x in X:
        x = Fraction(x)
        if not 0 < x < 1:
            raise ValueError(f"{x} outside the open unit interval")
        if x not in values:
            values.append(x)
    if not values:
        raise ValueError("X must be nonempty")
    lo = min(values)
    k = 0
    while lo.numerator * m**k < lo.denominator:  # until m**-k <= min X
        k += 1
    return SumEncoder(m, k, tuple(values))


# ---------------------------------------------------------------------------
# Lazily indexed per-round digit tables
# ---------------------------------------------------------------------------

class _RoundTables:
    """Shared digit bookkeeping for the dynamic rules below.

    ``boundaries[r]`` is the digit position above round r's value block:
    round-r values have exponents in (boundaries[r], boundaries[r+1]].
    Block 0 has a fixed width (the initial palette); later blocks have
    width ``capacity`` and tables filled in encounter order.
    """

    def __init__(self, base: int, capacity: int, boundaries: list[int],
                 tables: list[dict[DigitFraction, int]] | None = None):
        self.base = base
        self.capacity = capacity
        self.boundaries = boundaries  # grows on demand
        self.tables: list[dict[DigitFraction, int]] = tables if tables is not None else []

    def round_of(self, value: DigitFraction) -> int:
        e = value.exp
        while e > self.boundaries[-1]:
            self.boundaries.append(self.boundaries[-1] + self.capacity)
        for r in range(len(self.boundaries) - 1):
            if self.boundaries[r] < e <= self.boundaries[r + 1]:
                return r
        raise AssertionError(f"exponent {e} below every block")

    def value_for(self, r: int, element: DigitFraction) -> DigitFraction:
        """f_r(element): assign the next free index on first encounter."""
        while len(self.tables) <= r:
            self.tables.append({})
        table = self.tables[r]
        idx = table.get(element)
        if idx is None:
            idx = len(table) + 1
            if idx > self.capacity:
                raise CapacityExhausted(
                    f"round {r} value table exceeded capacity {self.capacity}")
            table[element] = idx
        while len(self.boundaries) <= r + 1:
            self.boundaries.append(self.boundaries[-1] + self.capacity)
        return DigitFraction.power(self.base, self.boundaries[r] + idx)

    def to_json(self) -> dict:
        return {
            "base": self.base,
            "capacity": self.capacity,
            "boundaries": list(self.boundaries),
            "tables": [
                [{"num": str(v.num), "exp": v.exp, "index": i}
                 for v, i in sorted(t.items(), key=lambda kv: kv[1])]
                for t in self.tables
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "_RoundTables":
        base = data["base"]
        tables = [
            {DigitFraction.make(base, int(e["num"]), e["exp"]): e["index"]
             for e in t}
            for t in data["tables"]
        ]
        return cls(base, data["capacity"], list(data["boundaries"]), tables)


def _to_digit(base: int, x) -> DigitFraction:
    if isinstance(x, DigitFraction):
        if x.base != base:
            raise ValueError("mixed digit bases")
        return x
    if isinstance(x, int):
        return DigitFraction.make(base, x, 0)
    if isinstance(x, Fraction):
        return DigitFraction.from_fraction(base, x)
    raise TypeError(f"not a rational: {x!r}")


@register_dynamic_oracle
class DigitEncoderRule(DynamicOracle):
    """Input encoder: label bit-vector -> its round-0 digit value.

    Bit-vectors are ranked by their little-endian integer value, giving an
    injection of the 2**ell initial colours into the first digit block.
    """

    kind = "wl-digit-encoder"

    def __init__(self, base: int, num_labels: int, dim: int, offset: int):
        self.base = base
        self.num_labels = num_labels
        self.dim = dim
        self.offset = offset

    def compute(self, vec: tuple) -> tuple:
        if len(vec) != self.dim:
            raise ValueError(f"encoder expects dimension {self.dim}")
        bits = vec[: self.num_labels]
        if any(b not in (0, 1) for b in bits):
            raise ValueError("encoder input must be label bits")
        if any(x != 0 for x in vec[self.num_labels:]):
            raise ValueError("encoder input padding must be zero")
        rank = 1 + sum(int(b) << i for i, b in enumerate(bits))
        f = DigitFraction.power(self.base, self.offset + rank)
        return (f,) + (0,) * (self.dim - 1)

    def to_params(self) -> dict:
        return {"base": self.base, "numLabels": self.num_labels,
                "dim": self.dim, "offset": self.offset}

    @classmethod
    def from_params(cls, params: dict) -> "DigitEncoderRule":
        return cls(params["base"], params["numLabels"], params["dim"],
                   params["offset"])


@register_dynamic_oracle
class OneHotEncoderRule(DynamicOracle):
    """Input encoder for tuple networks: one-hot vector -> digit value."""

    kind = "one-hot-digit-encoder"

    def __init__(self, base: int, dim: int, offset: int):
        self.base = base
        self.dim = dim
        self.offset = offset

    def compute(self, vec: tuple) -> tuple:
        if len(vec) != self.dim or sum(vec) != 1 or any(b not in (0, 1) for b in vec):
            raise ValueError("expected a one-hot input")
        rank = vec.index(1) + 1
        f = DigitFraction.power(self.base, self.offset + rank)
        return (f,) + (0,) * (self.dim - 1)

    def to_params(self) -> dict:
        return {"base": self.base, "dim": self.dim, "offset": self.offset}

    @classmethod
    def from_params(cls, params: dict) -> "OneHotEncoderRule":
        return cls(params["base"], params["dim"], params["offset"])


@register_dynamic_oracle
class DigitCombRule(DynamicOracle):
    """The recurrent combination g(x + sum of scaled channel sums).

    The input is the concatenation of (self, channel_1, ..., channel_c)
    blocks of equal width; channel j is scaled by coeffs[j].  The scaled
    sum is a digit string over the previous round's block, hence decodes
    the self value (odd multiplicity) and every channel multiset; the rule
    maps it injectively to a fresh value in the next block.
    """

    kind = "wl-digit-comb"

    def __init__(self, base: int, dim: int, coeffs: tuple[int, ...],
                 tables: _RoundTables):
        self.base = base
        self.dim = dim
        self.coeffs = tuple(coeffs)
        self.tables = tables

    def canonical_key(self, vec: tuple) -> tuple:
        out = []
        for x in vec:
            if isinstance(x, DigitFraction) or (isinstance(x, int) and x == 0):
                out.append(0 if not x else x)
            else:
                d = _to_digit(self.base, x)
                out.append(0 if d.num == 0 else d)
        return tuple(out)

    def compute(self, vec: tuple) -> tuple:
        q = self.dim
        blocks = len(vec) // q
        if blocks != 1 + len(self.coeffs) or len(vec) % q:
            raise ValueError(
                f"expected {1 + len(self.coeffs)} blocks of width {q}, got {len(vec)}")
        if any(vec[b * q + j] != 0 for b in range(blocks) for j in range(1, q)):
            raise AssertionError("feature confinement violated: nonzero padding")
        u = _to_digit(self.base, vec[0])
        for j, coeff in enumerate(self.coeffs):
            u = u + coeff * _to_digit(self.base, vec[(j + 1) * q])
        if not u.in_unit_interval():
            raise AssertionError("feature confinement violated: sum left (0,1)")
        # a sum of round-(r-1) values has its digits in block r-1 and is
        # itself a round-r element: its fresh value lives in block r
        r = self.tables.round_of(u) + 1
        f = self.tables.value_for(r, u)
        return (f,) + (0,) * (q - 1)

    def to_params(self) -> dict:
        return {"dim": self.dim, "coeffs": list(self.coeffs),
                "tables": self.tables.to_json()}

    @classmethod
    def from_params(cls, params: dict) -> "DigitCombRule":
        tables = _RoundTables.from_json(params["tables"])
        return cls(tables.base, params["dim"], tuple(params["coeffs"]), tables)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def build_wl_gnn(n: int, num_labels: int = 0, capacity: int = 256) -> GnnModel:
    """A recurrent network whose round-t feature partition equals the
    round-t colour-refinement partition on every graph of order <= n.

    Self value enters the digit sum once, each neighbour value twice, so
    multiset orders stay below m = 2n and the self value is recoverable
    as the odd-multiplicity element.  Exact rational mode only.
    """
    if n < 1:
        raise ValueError("order bound must be >= 1")
    m = 2 * n
    q = max(num_labels, 1)
    palette = 2**num_labels
    k0 = _ceil_log(m, palette + 1)
    encoder = OracleTable(dynamic=DigitEncoderRule(m, num_labels, q, k0))
    tables = _RoundTables(m, capacity, [k0, k0 + palette])
    comb = OracleTable(dynamic=DigitCombRule(m, q, (2,), tables))
    return GnnModel(input_dim=q, recurrent=GnnLayer(comb), iter_policy="n",
                    numeric_mode=RATIONAL, input_encoder=encoder)


def build_wl1_gnn(n: int, num_labels: int = 0, capacity: int = 256) -> GnnModel:
    """The global-readout variant: round-t features match 1-WL.

    The all-vertex sum gets stride 4n, so per-slot multiplicities decompose
    uniquely as a + 2b + 4n*c with a the self bit, b the neighbour count
    and c the global count; m = 4n^2 + 2n bounds the digit values.
    """
    if n < 1:
        raise ValueError("order bound must be >= 1")
    m = 4 * n * n + 2 * n
    q = max(num_labels, 1)
    palette = 2**num_labels
    k0 = _ceil_log(m, palette + 1)
    encoder = OracleTable(dynamic=DigitEncoderRule(m, num_labels, q, k0))
    tables = _RoundTables(m, capacity, [k0, k0 + palette])
    comb = OracleTable(dynamic=DigitCombRule(m, q, (2, 4 * n), tables))
    return GnnModel(input_dim=q, recurrent=GnnLayer(comb, global_readout=True),
                    iter_policy="n", numeric_mode=RATIONAL, input_encoder=encoder)


def build_kgnn_refiner(G_order: int, k: int, num_labels: int = 0,
                       capacity: int = 256) -> GnnModel:
    """A recurrent tuple network over the derived structure whose round-t
    partitions match oblivious k-WL on graphs of order <= G_order.

    Relation i's messages are scaled by 2*(2n)**(i-1): per-slot
    multiplicities decompose as the self bit plus base-2n digits of the
    per-relation neighbour counts.
    """
    n = G_order
    if n < 1 or k < 1:
        raise ValueError("order bound and k must be >= 1")
    coeffs = [2 * (2 * n) ** (i - 1) for i in range(1, k + 1)]
    m = 2 + sum(c * (n - 1) for c in coeffs)
    if m < 2:
        m = 2
    type_len = 2 * (k * (k - 1) // 2) + k * num_labels
    T = 2**type_len
    k0 = _ceil_log(m, T + 1)
    encoder = OracleTable(dynamic=OneHotEncoderRule(m, T, k0))
    tables = _RoundTables(m, capacity, [k0, k0 + T])
    comb = OracleTable(dynamic=DigitCombRule(m, T, (1,), tables))
    messages = tuple(
        tuple(tuple(c if i == j else 0 for j in range(T)) for i in range(T))
        for c in coeffs
    )
    return GnnModel(input_dim=T, recurrent=KgnnLayer(messages, comb),
                    iter_policy="n", numeric_mode=RATIONAL, input_encoder=encoder)


# ---------------------------------------------------------------------------
# Random-identifier triangle detector
# ---------------------------------------------------------------------------

@register_dynamic_oracle
class RniIdDigitsRule(DynamicOracle):
    """Map a random 64-bit dyadic identifier to a digit slot value."""

    kind = "rni-id-digits"

    def __init__(self, base: int, slots: int):
        self.base = base
        self.slots = slots

    def compute(self, vec: tuple) -> tuple:
        x = vec[0]
        scaled = x * 2**64
        if isinstance(scaled, Fraction):
            if scaled.denominator != 1:
                raise ValueError("identifier is not a 64-bit dyadic")
            scaled = scaled.numerator
        slot = int(scaled) % self.slots + 1
        return (DigitFraction.power(self.base, slot), 0)

    def to_params(self) -> dict:
        return {"base": self.base, "slots": self.slots}

    @classmethod
    def from_params(cls, params: dict) -> "RniIdDigitsRule":
        return cls(params["base"], params["slots"])


@register_dynamic_oracle
class RniGatherRule(DynamicOracle):
    """Keep the own slot value, adopt the neighbour slot sum."""

    kind = "rni-gather"

    def compute(self, vec: tuple) -> tuple:
        return (vec[0], vec[2])

    def to_params(self) -> dict:
        return {}

    @classmethod
    def from_params(cls, params: dict) -> "RniGatherRule":
        return cls()


@register_dynamic_oracle
class RniTriangleVerdictRule(DynamicOracle):
    """Decode digit-encoded neighbour-slot sets and test for a triangle.

    Input: own slot value f_v, own neighbour-set sum S_v, neighbour sums
    of both.  A slot s with a positive digit in S_v belongs to a
    neighbour u; a positive digit at s in the neighbours' S-sum means
    some w adjacent to v has u as a neighbour, hence v-u-w is a triangle
    (the own slot is excluded to ignore paths returning to v).
    """

    kind = "rni-triangle-verdict"

    def __init__(self, base: int):
        self.base = base

    def compute(self, vec: tuple) -> tuple:
        f_v, s_v, _f_sum, t_sum = vec
        own = _to_digit(self.base, f_v).digit_map()
        own_slot = next(iter(own), None)
        nbr_slots = _to_digit(self.base, s_v).digit_map()
        two_step = _to_digit(self.base, t_sum).digit_map()
        for slot in nbr_slots:
            if slot != own_slot and two_step.get(slot, 0) >= 1:
                return (1,)
        return (0,)

    def to_params(self) -> dict:
        return {"base": self.base}

    @classmethod
    def from_params(cls, params: dict) -> "RniTriangleVerdictRule":
        return cls(params["base"])


def build_rni_triangle_model(n: int = 6, slots: int = 4096) -> GnnModel:
    """A three-layer model with one randomly initialised coordinate that
    outputs 1 iff the vertex lies in a triangle, up to slot collisions.

    Works on unlabelled graphs of order <= n; produces exact 0/1 outputs,
    so any margin threshold below 1/2 is met whenever the random
    identifiers land in distinct slots.
    """
    base = 2 * n
    layers = (
        GnnLayer(OracleTable(dynamic=RniIdDigitsRule(base, slots))),
        GnnLayer(OracleTable(dynamic=RniGatherRule())),
        GnnLayer(OracleTable(dynamic=RniTriangleVerdictRule(base))),
    )
    return GnnModel(input_dim=1, layers=layers, numeric_mode=RATIONAL,
                    rni_padding=1)
