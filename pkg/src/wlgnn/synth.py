"""Synthesis of guarded two-variable counting formulas that witness
colour-refinement differences.

If colour refinement separates (G, v) from (H, v2) within t rounds, there
is a guarded formula with two variable names and quantifier rank at most
t that holds at v and fails at v2.  The construction works entirely on
the canonical colour trees: a refined colour embeds its parent colour and
its histogram of neighbour colours, so a mismatch is either inherited
(recurse into the parents) or a neighbour-count mismatch for some class c
(emit "at least p neighbours satisfying the class-c separator").

Class separators are memoised per (true colour, false colour, variable),
which keeps the construction polynomial in the number of colour classes;
no bound on formula *size* is claimed.
"""

from __future__ import annotations

from .colouring import ColourId
from .graphs import LabelledGraph
from .logic import And, CountExists, Edge, Formula, Label, Not, top
from .wl import pair_run


def _other(var: str) -> str:
    return "y" if var == "x" else "x"


class _Synthesiser:
    def __init__(self, interner):
        self.interner = interner
        self.memo: dict[tuple[ColourId, ColourId, str], Formula] = {}

    def separator(self, c_true: ColourId, c_false: ColourId, var: str) -> Formula:
        """A formula in one free variable satisfied by every vertex of
        colour c_true and by no vertex of colour c_false."""
        if c_true == c_false:
            raise ValueError("cannot separate a colour from itself")
        key = (c_true, c_false, var)
        hit = self.memo.get(key)
        if hit is not None:
            return hit

        kt = self.interner.key_of(c_true)
        kf = self.interner.key_of(c_false)
        if kt[0] != "cr" or kf[0] != "cr" or kt[1] != kf[1]:
            raise ValueError("separator needs two colour-refinement colours of one round")
        round_t = kt[1]

        if round_t == 0:
            bits_t, bits_f = kt[2], kf[2]
            for i, (a, b) in enumerate(zip(bits_t, bits_f)):
                if a != b:
                    phi = Label(i + 1, var) if a == 1 else Not(Label(i + 1, var))
                    break
            else:
                raise AssertionError("distinct round-0 colours with equal labels")
        else:
            prev_t, hist_t = kt[2], dict(kt[3])
            prev_f, hist_f = kf[2], dict(kf[3])
            if prev_t != prev_f:
                phi = self.separator(prev_t, prev_f, var)
            else:
                support = sorted(set(hist_t) | set(hist_f))
                diff = [c for c in support
                        if hist_t.get(c, 0) != hist_f.get(c, 0)]
                assert diff, "distinct refined colours with equal histograms"
                c = diff[0]
                p = hist_t.get(c, 0)
                q = hist_f.get(c, 0)
                w = _other(var)
                conjuncts = [self.separator(c, d, w) for d in support if d != c]
                selector = conjuncts[0] if len(conjuncts) == 1 else (
                    And(tuple(conjuncts)) if conjuncts else top(w))
                body = And((Edge(var, w), selector))
                if p > q:
                    phi = CountExists(p, w, body)
                else:
                    phi = Not(CountExists(q, w, body))

        self.memo[key] = phi
        return phi


def synthesize_distinguishing_formula(
    G: LabelledGraph, v: int, H: LabelledGraph, v2: int, t: int,
) -> Formula | None:
    """A guarded two-variable formula holding at (G, v) but not (H, v2),
    of quantifier rank at most t, or None when colour refinement does not
    separate the two vertices within t rounds.

    The free variable of the returned formula is ``x``.
    """
    if t < 0:
        raise ValueError("round must be >= 0")
    run_g, run_h = pair_run(G, H, "cr", t_max=t)
    at = min(t, run_g.last_round, run_h.last_round)
    c_v = run_g.colour(v, at)
    c_v2 = run_h.colour(v2, at)
    if c_v == c_v2:
        return None
    return _Synthesiser(run_g.interner).separator(c_v, c_v2, "x")
