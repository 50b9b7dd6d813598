"""Twist differentials, weight systems, and the weight solver.

The color-2 differential has three pieces: (1) contraction of bulk
edges with an internal endpoint, (2) collapse of a cluster of internal
vertices (with at most one external boundary vertex, the target) at a
boundary point, weighted by the cluster's weight, and (3) ejection of a
set of internal vertices to infinity, weighted by the quotient graph's
weight.  Pieces 2 and 3 are parametric in a WeightSystem assigning
rational numbers to closed graphs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

from .graphs import (CanonicalGraph, ColoredGraph, GraphError, canonicalize,
                     degree, is_reduced, parse, serialize)
from .splits import build_graph, contiguous_run, split_words, star_sign_front
from .vectors import GraphVector

# Global sign conventions for the three pieces (relative signs matter;
# fixed by the d^2 = 0 and co-Leibniz requirements).
PIECE1_SIGN = 1
PIECE2_SIGN = 1
PIECE3_SIGN = 1



# ---------------------------------------------------------------------------
# polynomial coefficients in unknown weights


class WeightPoly:
    """Polynomial in weight symbols over Q (degree <= 2 in practice)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = dict(terms or {})

    @classmethod
    def const(cls, c):
        c = Fraction(c)
        return cls({(): c} if c else {})

    @classmethod
    def symbol(cls, key):
        return cls({(key,): Fraction(1)})

    def _merge(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            new = out.get(m, 0) + c
            if new:
                out[m] = new
            else:
                out.pop(m, None)
        return WeightPoly(out)

    def __add__(self, other):
        if not isinstance(other, WeightPoly):
            other = WeightPoly.const(other)
        return self._merge(other)

    __radd__ = __add__

    def __neg__(self):
        return WeightPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, WeightPoly):
            other = WeightPoly.const(other)
        return self._merge(other.__neg__())

    def __rsub__(self, other):
        return WeightPoly.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, WeightPoly):
            c = Fraction(other)
            if not c:
                return WeightPoly()
            return WeightPoly({m: co * c for m, co in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                new = out.get(m, 0) + c1 * c2
                if new:
                    out[m] = new
                else:
                    out.pop(m, None)
        return WeightPoly(out)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, WeightPoly):
            return self.terms == other.terms
        return self.terms == WeightPoly.const(other).terms

    def substitute(self, values):
        out = WeightPoly()
        for mono, c in self.terms.items():
            acc = WeightPoly.const(c)
            for key in mono:
                if key in values:
                    acc = acc * values[key]
                else:
                    acc = acc * WeightPoly.symbol(key)
            out = out + acc
        return out

    def affine_parts(self):
        """(constant, {symbol: coeff}); raises on quadratic content."""
        const = Fraction(0)
        lin = {}
        for mono, c in self.terms.items():
            if len(mono) == 0:
                const = c
            elif len(mono) == 1:
                lin[mono[0]] = lin.get(mono[0], Fraction(0)) + c
            else:
                raise ValueError("polynomial is not affine: %r" % (mono,))
        return const, lin

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0])):
            if not m:
                bits.append(str(c))
            else:
                bits.append("%s*%s" % (c, "*".join(k.key for k in m)))
        return " + ".join(bits)


# ---------------------------------------------------------------------------
# weight systems


def weight_support_ok(g):
    """Top-degree support predicate for closed-graph weights."""
    if not g.is_closed():
        return False
    if g.ki + g.kw < 1:
        return False
    return (g.n - 1) * len(g.edges) == g.n * g.ki + (g.n - 1) * g.kw - g.n


def _components_ignoring_order(g):
    parent = {v: v for v in g.vertices()}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in g.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(v) for v in g.vertices()})


class WeightSystem:
    """Sparse map from closed canonical graphs to rational weights."""

    def __init__(self, n, table=None):
        self.n = n
        self.table = {}
        self.missing = set()
        if table:
            for k, v in table.items():
                self.set(k, v)

    def _canon_key(self, key):
        if isinstance(key, str):
            key = parse(key)
        if isinstance(key, ColoredGraph):
            canon, sign = canonicalize(key, 2)
            if sign == 0:
                raise GraphError("weight key is a vanishing graph")
            if sign != 1:
                raise GraphError("weight key %s is not in canonical orientation"
                                 % serialize(key))
            key = canon
        return key

    def set(self, key, value):
        key = self._canon_key(key)
        g = key.graph()
        if g.n != self.n:
            raise GraphError("weight key has wrong ambient dimension")
        if not weight_support_ok(g):
            raise GraphError("weight key %s violates the support predicate"
                             % key.key)
        value = value if isinstance(value, WeightPoly) else Fraction(value)
        if value and self.n >= 3 and _components_ignoring_order(g) > 1:
            raise GraphError("nonzero weight on a disconnected graph (n>=3)")
        if value:
            self.table[key] = value
        else:
            self.table[key] = Fraction(0)

    def value(self, g):
        """Weight of a raw closed graph, canonical sign included."""
        if not weight_support_ok(g):
            return Fraction(0)
        canon, sign = canonicalize(g, 2)
        if sign == 0:
            return Fraction(0)
        if canon in self.table:
            return self.table[canon] * sign
        self.missing.add(canon)
        return Fraction(0)

    def as_json(self):
        items = {k.key: str(v) for k, v in sorted(self.table.items())}
        return {"n": self.n, "weights": items}

    @classmethod
    def from_json(cls, data):
        ws = cls(int(data["n"]))
        for key, val in sorted(data["weights"].items()):
            ws.set(key, Fraction(val))
        return ws

    def dump(self, fh):
        json.dump(self.as_json(), fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, fh):
        return cls.from_json(json.load(fh))


class SymbolicWeights(WeightSystem):
    """Weight system that returns a fresh symbol for unknown keys."""

    def value(self, g):
        if not weight_support_ok(g):
            return Fraction(0)
        canon, sign = canonicalize(g, 2)
        if sign == 0:
            return Fraction(0)
        if canon in self.table:
            val = self.table[canon]
            return val * sign
        return WeightPoly.symbol(canon) * sign


def pair_graph():
    """The two-boundary-vertex edgeless closed graph (n=2), weight 1."""
    return build_graph(2, [], [], [], ["w1", "w2"], [], ("w1", "w2"))


def point_graph(n):
    """The single-bulk-vertex closed graph; its weight 1 drives the
    conversion piece (a bulk vertex with no out-edges falls to the
    boundary)."""
    return build_graph(n, [], ["i1"], [], [], [], () if n == 2 else None)


def hkr_graph(m, n=2):
    """One bulk vertex with m edges down to m boundary vertices."""
    ws = ["w%d" % j for j in range(1, m + 1)]
    edges = [("i1", w) for w in ws]
    return build_graph(n, [], ["i1"], [], ws, edges, tuple(ws) if n == 2 else None)


def builtin_weights(n):
    """The weight fragment of contraction-only mode: just the boundary
    pair merge for n=2.  The point weight stays unset, so no conversion
    terms arise."""
    ws = WeightSystem(n)
    if n == 2:
        ws.set(pair_graph(), 1)
    return ws


# ---------------------------------------------------------------------------
# differential configuration


@dataclass(frozen=True)
class DifferentialConfig:
    pieces: str = "full"        # "contraction" | "full"
    variant: str = "full"       # "full" | "reduced"

    def __post_init__(self):
        if self.pieces not in ("contraction", "full"):
            raise GraphError("unknown pieces %r" % self.pieces)
        if self.variant not in ("full", "reduced"):
            raise GraphError("unknown variant %r" % self.variant)


CONTRACTION = DifferentialConfig(pieces="contraction")
FULL = DifferentialConfig(pieces="full")


# ---------------------------------------------------------------------------
# piece 1: edge contraction


def _contract_terms(g, color, out, coeff, variant):
    ep = g.edge_parity()
    ip = g.int1_parity()
    int1 = g.int_one()
    adjacency = {}
    for a, b in g.edges:
        adjacency.setdefault(frozenset((a, b)), 0)
        adjacency[frozenset((a, b))] += 1
    for pos, (a, b) in enumerate(g.edges):
        if b[0] not in ("x", "i"):
            continue  # bulk-boundary edges collapse via piece 2
        if a[0] != "i" and b[0] != "i":
            continue
        if adjacency[frozenset((a, b))] > 1:
            continue  # contraction would create a self-loop
        dying, survivor = (b, a) if b[0] == "i" else (a, b)
        sign = 1
        if dying == a and g.n % 2:
            sign = -sign  # the collision sphere is oriented along the edge
        if ep and pos % 2:
            sign = -sign
        if ip:
            before = int(dying[1:]) - 1
            if before % 2:
                sign = -sign
        sub = lambda v: survivor if v == dying else v
        edges = [(sub(x), sub(y)) for i, (x, y) in enumerate(g.edges) if i != pos]
        keep_i = [v for v in int1 if v != dying]
        h = build_graph(g.n, g.ext_one(), keep_i, g.ext_two(), g.int_two(),
                        edges, g.order)
        if variant == "reduced" and not is_reduced(h, "reduced", color):
            continue
        out.add_term(h, coeff * sign * PIECE1_SIGN)


def diff_color1(x, cfg=CONTRACTION):
    """Edge-contraction differential on the bulk-only complex."""
    if x.color != 1:
        raise GraphError("diff_color1 needs a color-1 vector")
    out = GraphVector(x.n, 1, x.r, x.s)
    for key, coeff in x.terms.items():
        _contract_terms(key.graph(), 1, out, coeff, cfg.variant)
    return out


# ---------------------------------------------------------------------------
# pieces 2 and 3


def _connected(vertices, edges):
    vertices = list(vertices)
    if not vertices:
        return True
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(v) for v in vertices}) == 1


def _cluster_collapse_terms(g, w, out, coeff, variant):
    """Piece 2: collapse a cluster at a boundary point."""
    internals = g.int_one() + g.int_two()
    targets = [None] + list(g.ext_two())
    for target in targets:
        for bits in itertools.product((False, True), repeat=len(internals)):
            a_set = tuple(v for v, t in zip(internals, bits) if t)
            cluster = set(a_set) | ({target} if target else set())
            if not a_set:
                continue  # collapsing a lone external slot is a no-op
            if len(cluster) == len(g.vertices()):
                continue  # the frame left behind has no scale: not a stratum
            # cheap support screen on the would-be weight graph
            k1 = sum(1 for v in cluster if v[0] == "i")
            k2 = len(cluster) - k1
            keep_e, cl_e, cross_in, cross_out, keep_ii, cl_ii, sign = \
                split_words(g, cluster, crossing_to_cluster=False,
                            consumed_first=True)
            if cross_out:
                continue
            if (g.n - 1) * len(cl_e) != g.n * k1 + (g.n - 1) * k2 - g.n:
                continue
            if g.n >= 3 and not _connected(cluster, [g.edges[i] for i in cl_e]):
                continue
            # boundary-collapse strata carry the opposite orientation in
            # odd ambient dimension
            if g.n % 2:
                sign = -sign
            cl_members_ii = [v for v in cluster if v[0] in ("b", "w")]
            if g.n == 2:
                wg_order = tuple(v for v in g.order if v in cluster)
                wg_int2 = list(wg_order)
                if cl_members_ii:
                    slot = contiguous_run(g.order, cl_members_ii)
                    if slot is None:
                        continue
                    slots = [slot]
                else:
                    slots = list(range(len(keep_ii) + 1))
            else:
                wg_order = None
                wg_int2 = [v for v in g.int_two() if v in cluster] \
                    + ([target] if target else [])
                slots = [len(keep_ii)]
            weight_graph = build_graph(g.n, [], [v for v in g.int_one() if v in cluster],
                                       [], wg_int2,
                                       [g.edges[i] for i in cl_e], wg_order)
            wval = w.value(weight_graph)
            if not wval:
                continue
            star = target if target else "*"
            red = lambda v: star if v in cluster else v
            out_edges = [(red(g.edges[i][0]), red(g.edges[i][1])) for i in keep_e]
            keep_w = [v for v in g.int_two() if v not in cluster]
            keep_i = [v for v in g.int_one() if v not in cluster]
            for slot in slots:
                if g.n == 2:
                    new_order = tuple(keep_ii[:slot]) + (star,) + tuple(keep_ii[slot:])
                else:
                    new_order = None
                if target and g.n >= 3:
                    s_star = 1  # the external target carries no letter
                else:
                    s_star = star_sign_front(g, len(keep_e), len(keep_i), slot)
                if target:
                    h = build_graph(g.n, g.ext_one(), keep_i, g.ext_two(),
                                    keep_w, out_edges, new_order)
                else:
                    h = build_graph(g.n, g.ext_one(), keep_i, g.ext_two(),
                                    keep_w + [star], out_edges, new_order)
                if variant == "reduced" and not is_reduced(h, "reduced", 2):
                    continue
                out.add_term(h, coeff * sign * s_star * wval * PIECE2_SIGN)


def _ejection_terms(g, w, out, coeff, variant):
    """Piece 3: eject a set of internal vertices to infinity."""
    internals = g.int_one() + g.int_two()
    if not internals:
        return
    for bits in itertools.product((False, True), repeat=len(internals)):
        w_set = {v for v, t in zip(internals, bits) if t}
        if not w_set:
            continue
        keep_vertices = [v for v in g.vertices() if v not in w_set]
        if len(keep_vertices) == 0 or (
                len(keep_vertices) == 1 and keep_vertices[0][0] in ("b", "w")):
            continue  # the frame left behind has no scale: not a stratum
        keep_e, cl_e, cross_in, cross_out, keep_ii, cl_ii, sign = \
            split_words(g, w_set, crossing_to_cluster=True,
                        consumed_first=True)
        if cross_in:
            continue  # an edge into the ejected set dies at the boundary
        k1 = sum(1 for v in w_set if v[0] == "i")
        k2 = len(w_set) - k1 + 1  # plus the collapse point
        if (g.n - 1) * len(cl_e) != g.n * k1 + (g.n - 1) * k2 - g.n:
            continue
        red = lambda v: "*" if v not in w_set else v
        wg_edges = [(red(g.edges[i][0]), red(g.edges[i][1])) for i in cl_e]
        if g.n == 2:
            keep_members_ii = [v for v in g.order if v not in w_set]
            if keep_members_ii:
                start = contiguous_run(g.order, keep_members_ii)
                if start is None:
                    continue
                slots = [sum(1 for v in g.order[:start] if v in w_set)]
            else:
                slots = list(range(len(cl_ii) + 1))
        else:
            slots = [len(cl_ii)]
        keep_i = [v for v in g.int_one() if v not in w_set]
        keep_w = [v for v in g.int_two() if v not in w_set]
        h = build_graph(g.n, g.ext_one(), keep_i, g.ext_two(), keep_w,
                        [g.edges[i] for i in keep_e],
                        tuple(keep_ii) if g.n == 2 else None)
        if variant == "reduced" and not is_reduced(h, "reduced", 2):
            continue
        n_cl_i = sum(1 for v in w_set if v[0] == "i")
        for slot in slots:
            if g.n == 2:
                wg_order = tuple(cl_ii[:slot]) + ("*",) + tuple(cl_ii[slot:])
                wg_int2 = [v for v in wg_order]
            else:
                wg_order = None
                wg_int2 = [v for v in g.int_two() if v in w_set] + ["*"]
            s_star = star_sign_front(g, len(cl_e), n_cl_i, slot)
            weight_graph = build_graph(g.n, [],
                                       [v for v in g.int_one() if v in w_set],
                                       [], wg_int2, wg_edges, wg_order)
            wval = w.value(weight_graph)
            if not wval:
                continue
            out.add_term(h, coeff * sign * s_star * wval * PIECE3_SIGN)


def diff_color2(x, w=None, cfg=FULL):
    """Three-piece twist differential on the boundary-touching complex."""
    if x.color != 2:
        raise GraphError("diff_color2 needs a color-2 vector")
    if cfg.pieces == "full":
        if w is None:
            raise GraphError("full differential requires a weight system")
    else:
        if w is not None:
            raise GraphError("contraction-only mode takes no weight system")
        w = builtin_weights(x.n)
    out = GraphVector(x.n, 2, x.r, x.s)
    for key, coeff in x.terms.items():
        g = key.graph()
        _contract_terms(g, 2, out, coeff, cfg.variant)
        _cluster_collapse_terms(g, w, out, coeff, cfg.variant)
        _ejection_terms(g, w, out, coeff, cfg.variant)
    return out


def apply_diff(x, w=None, cfg=FULL):
    return diff_color1(x, cfg) if x.color == 1 else diff_color2(x, w, cfg)


# ---------------------------------------------------------------------------
# d^2 checking


@dataclass
class Obstruction:
    element: CanonicalGraph
    image: object  # GraphVector with nonzero (possibly symbolic) coefficients


@dataclass
class ObstructionReport:
    failures: list

    @property
    def ok(self):
        return not self.failures

    def __repr__(self):
        if self.ok:
            return "ObstructionReport(ok)"
        return "ObstructionReport(%d failures; first: %r)" % (
            len(self.failures), self.failures[0])


def check_d_squared(basis, w=None, cfg=FULL, color=2):
    """Apply d twice to every basis element; report nonzero images."""
    failures = []
    for key in basis:
        g = key.graph() if isinstance(key, CanonicalGraph) else key
        canon = key if isinstance(key, CanonicalGraph) else canonicalize(g, color)[0]
        v = GraphVector(g.n, color, g.r, g.s, [(canon, Fraction(1))])
        dd = apply_diff(apply_diff(v, w, cfg), w, cfg)
        if dd:
            failures.append(Obstruction(canon, dd))
    return ObstructionReport(failures)


# ---------------------------------------------------------------------------
# the weight solver


def _gauss_solve(rows, unknowns, anchors=None):
    """Solve rows (dict symbol->coeff, const) = 0; returns (values, free).

    Free unknowns take their anchor value (default zero); pivots are
    expressed through them.  Raises GraphError on inconsistency.
    """
    order = {u: i for i, u in enumerate(unknowns)}
    mat = []
    for lin, const in rows:
        vec = [Fraction(0)] * len(unknowns)
        for sym, c in lin.items():
            vec[order[sym]] = c
        mat.append((vec, const))
    pivots = {}
    for col in range(len(unknowns)):
        piv = None
        for i, (vec, const) in enumerate(mat):
            if i in pivots.values():
                continue
            if vec[col]:
                piv = i
                break
        if piv is None:
            continue
        pvec, pconst = mat[piv]
        inv = Fraction(1) / pvec[col]
        pvec = [c * inv for c in pvec]
        pconst = pconst * inv
        mat[piv] = (pvec, pconst)
        for i, (vec, const) in enumerate(mat):
            if i == piv or not vec[col]:
                continue
            f = vec[col]
            mat[i] = ([a - f * b for a, b in zip(vec, pvec)], const - f * pconst)
        pivots[col] = piv
    for i, (vec, const) in enumerate(mat):
        if i not in pivots.values() and const and not any(vec):
            raise GraphError("inconsistent normalization")
    anchors = anchors or {}
    free_cols = [c for c in range(len(unknowns)) if c not in pivots]
    values = {}
    for col in free_cols:
        values[unknowns[col]] = anchors.get(unknowns[col], Fraction(0))
    for col, u in enumerate(unknowns):
        if col in pivots:
            vec, const = mat[pivots[col]]
            val = -const
            for fc in free_cols:
                if vec[fc]:
                    val -= vec[fc] * values[unknowns[fc]]
            values[u] = val
    return values, [unknowns[c] for c in free_cols]


@dataclass
class SolveReport:
    weights: WeightSystem
    levels: list  # (level, n_unknowns, n_free)

    def __repr__(self):
        lines = ["SolveReport:"]
        for lvl, nu, nf in self.levels:
            lines.append("  level %d: %d unknowns, %d-dim residual freedom"
                         % (lvl, nu, nf))
        return "\n".join(lines)


def admissible_closed_graphs(n, max_internal):
    """Canonical closed graphs satisfying the support predicate."""
    from .basisgen import iter_basis_graphs
    found = []
    for key in iter_basis_graphs(n, 2, 0, 0, max_int1=max_internal,
                                 max_int2=max_internal,
                                 max_total=max_internal,
                                 max_edges=3 * max_internal):
        if weight_support_ok(key.graph()):
            found.append(key)
    return sorted(found)


def _constraint_arities(n):
    return [(0, 0), (1, 0), (0, 1), (1, 1)]


def _simplest_between(lo, hi):
    """The rational with smallest denominator in [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    if hi < lo:
        lo, hi = hi, lo
    if hi < 0:
        return -_simplest_between(-hi, -lo)
    if lo <= 0 <= hi:
        return Fraction(0)
    import math
    ceil_lo = Fraction(math.ceil(lo))
    if ceil_lo <= hi:
        return ceil_lo
    fl = Fraction(math.floor(lo))
    return fl + 1 / _simplest_between(1 / (hi - fl), 1 / (lo - fl))


def _anchor_value(key, samples=4000000, seed=1729):
    """Monte-Carlo anchor for a residually free weight (n=2 only).

    The estimate is snapped to the simplest rational inside its
    3-sigma band.
    """
    from .mcweights import mc_weight
    est = mc_weight(key.graph(), samples, seed)
    band = 3 * est.stderr + 1e-9
    return _simplest_between(est.estimate - band, est.estimate + band)


def solve_weights(n, max_level, normalization=None, verify=True,
                  arities=None, max_edges=None, anchor=None):
    """Extend a weight fragment so that d^2 vanishes within the truncation.

    `max_level` bounds the number of vertices of the solved weight
    graphs.  Proceeds level by level; at each level the unknown weights
    enter the d^2 equations affinely once lower levels are known.
    Residual freedom is anchored to Monte-Carlo estimates of the
    defining integrals for n=2 (snapped to small rationals), and to
    zero otherwise; the freedom dimensions are reported either way.
    """
    from .basisgen import iter_basis_graphs
    if normalization is None:
        normalization = default_normalization(n, max_level)
    if arities is None:
        arities = _constraint_arities(n) if max_level <= 3             else [(0, 0), (1, 0), (0, 1)]
    if max_edges is None:
        max_edges = 2 * max_level if max_level <= 3 else max_level + 2
    if anchor is None:
        anchor = (n == 2)
    sym = SymbolicWeights(n)
    for k, v in normalization.table.items():
        sym.set(k, v)

    admissible = admissible_closed_graphs(n, max_level)
    by_level = {}
    for key in admissible:
        g = key.graph()
        by_level.setdefault(g.ki + g.kw, []).append(key)

    constraints = []
    for (r, s) in arities:
        for key in iter_basis_graphs(n, 2, r, s, max_int1=max_level,
                                     max_int2=max_level,
                                     max_total=max_level,
                                     max_edges=max_edges):
            g = key.graph()
            v = GraphVector(n, 2, r, s, [(key, Fraction(1))])
            dd = diff_color2(diff_color2(v, sym), sym)
            for out_key, poly in dd.terms.items():
                if isinstance(poly, WeightPoly):
                    constraints.append(poly)
                elif poly:
                    raise GraphError("inconsistent normalization")

    solved = dict(sym.table)
    levels = []
    known = {k: WeightPoly.const(v) if not isinstance(v, WeightPoly) else v
             for k, v in solved.items()}
    for level in sorted(by_level):
        unknowns = [k for k in by_level[level] if k not in solved]
        if not unknowns:
            levels.append((level, 0, 0))
            continue
        unknown_set = set(unknowns)
        rows = []
        for poly in constraints:
            sub = poly.substitute(known)
            if not sub:
                continue
            syms = {s2 for mono in sub.terms for s2 in mono}
            if not syms <= unknown_set:
                continue
            try:
                const, lin = sub.affine_parts()
            except ValueError:
                continue
            rows.append((lin, const))
        _, free = _gauss_solve(rows, unknowns)
        anchors = {}
        if anchor:
            for u in free:
                anchors[u] = _anchor_value(u)
        values, free = _gauss_solve(rows, unknowns, anchors)
        for u, val in values.items():
            solved[u] = val
            known[u] = WeightPoly.const(val)
        levels.append((level, len(unknowns), len(free)))

    ws = WeightSystem(n)
    for k, v in solved.items():
        ws.set(k, v)
    report = SolveReport(ws, levels)
    if verify:
        # graphs with < max_level internal vertices only reference solved weights
        max_internal = max_level - 1
        for (r, s) in arities:
            basis = list(iter_basis_graphs(n, 2, r, s, max_int1=max_internal,
                                           max_int2=max_internal,
                                           max_total=max_internal,
                                           max_edges=min(max_edges,
                                                         2 * max_internal + 2)))
            rep = check_d_squared(basis, ws, FULL, color=2)
            if not rep.ok:
                raise GraphError("solved weights fail d^2 = 0: %r" % rep)
    return report


def default_normalization(n, max_level):
    """The pinned fragment: point conversion, boundary pair, and the
    one-bulk-vertex fan graphs at 1/m!.

    In this package's orientation convention the fan values alternate:
    c(fan_m) = -(-1)^(m(m+1)/2) / m!, giving -1, 1, 1/2, -1/6, -1/24, ...
    for m = 0 (the point), 1, 2, 3, 4.
    """
    ws = WeightSystem(n)
    ws.set(point_graph(n), -1)
    if n == 2:
        ws.set(pair_graph(), 1)
        fact = 1
        for m in range(1, max_level):
            fact *= m
            sgn = -1 if (m * (m + 1) // 2) % 2 == 0 else 1
            ws.set(hkr_graph(m), Fraction(sgn, fact))
    else:
        ws.set(hkr_graph(1, n), 1)
    return ws
