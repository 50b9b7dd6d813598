"""Colored directed graphs and their canonical forms.

The vertex model has four classes:

  * ``x1..xr``   external type I  (bulk, labelled)
  * ``i1..ikI``  internal type I  (bulk, interchangeable)
  * ``b1..bs``   external type II (boundary, labelled)
  * ``w1..wkII`` internal type II (boundary, interchangeable)

Edges are directed and never start at a type II vertex.  For ambient
dimension n = 2 every graph additionally carries a total order on all
type II vertices (drawn on a line); for n >= 3 no order is present.

Orientation data is a fixed word of "letters" per graph instance:
edges in list order (parity n-1), internal type I vertices in index
order (parity n), and type II letters (parity n-1): for n = 2 these
are *all* type II vertices in line order, for n >= 3 the internal
type II vertices in index order.  Every sign in this package is a
Koszul sign of a permutation of this word.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass


class GraphError(ValueError):
    """Invalid graph data."""


class ParseError(GraphError):
    """Malformed graph string; carries the offending position."""

    def __init__(self, message, text, pos):
        super().__init__("%s at position %d in %r" % (message, pos, text))
        self.pos = pos
        self.text = text


Vertex = str
Edge = tuple

_KIND_RANK = {"x": 0, "i": 1, "b": 2, "w": 3}


def vertex_key(v):
    """Sort key: externals first within each type, then by index."""
    return (_KIND_RANK[v[0]], int(v[1:]))


def is_type_two(v):
    return v[0] in ("b", "w")


def is_internal(v):
    return v[0] in ("i", "w")


# ---------------------------------------------------------------------------
# sign helpers


def perm_sign(perm):
    """Sign of a permutation given as a sequence of distinct sortable items."""
    n = len(perm)
    sign = 1
    seen = [False] * n
    pos = {v: i for i, v in enumerate(sorted(perm))}
    img = [pos[v] for v in perm]
    for i in range(n):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = img[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def koszul_sign(old, new, parity):
    """Koszul sign of reordering the word `old` into the word `new`.

    `old` and `new` contain the same distinct letters; `parity` maps a
    letter to 0 (even) or 1 (odd).  Crossing two odd letters costs -1.
    """
    if old == new:
        return 1
    pos = {v: i for i, v in enumerate(old)}
    seq = [pos[v] for v in new]
    odd = [parity(v) for v in new]
    sign = 1
    # count inversions among odd letters only
    for a in range(len(seq)):
        if not odd[a]:
            continue
        for b in range(a + 1, len(seq)):
            if odd[b] and seq[a] > seq[b]:
                sign = -sign
    return sign


def unshuffle_sign(flags, parity_odd):
    """Sign for moving flagged letters to the front, orders preserved.

    All letters are assumed to have the same parity; `parity_odd` is
    True when that parity is odd.  Equivalent to koszul_sign onto the
    word (flagged..., unflagged...).
    """
    if not parity_odd:
        return 1
    crossings = 0
    unflagged_seen = 0
    for f in flags:
        if f:
            crossings += unflagged_seen
        else:
            unflagged_seen += 1
    return -1 if crossings % 2 else 1


# ---------------------------------------------------------------------------
# the graph record


@dataclass(frozen=True)
class ColoredGraph:
    n: int
    r: int
    ki: int
    s: int
    kw: int
    edges: tuple
    order: tuple | None

    # -- vertex sets ------------------------------------------------------

    def ext_one(self):
        return tuple("x%d" % i for i in range(1, self.r + 1))

    def int_one(self):
        return tuple("i%d" % i for i in range(1, self.ki + 1))

    def ext_two(self):
        return tuple("b%d" % i for i in range(1, self.s + 1))

    def int_two(self):
        return tuple("w%d" % i for i in range(1, self.kw + 1))

    def vertices(self):
        return self.ext_one() + self.int_one() + self.ext_two() + self.int_two()

    def type_two(self):
        return self.ext_two() + self.int_two()

    def is_closed(self):
        return self.r == 0 and self.s == 0

    def num_edges(self):
        return len(self.edges)

    def valences(self):
        val = {v: 0 for v in self.vertices()}
        for a, b in self.edges:
            val[a] += 1
            val[b] += 1
        return val

    def in_out(self):
        ins = {v: 0 for v in self.vertices()}
        outs = {v: 0 for v in self.vertices()}
        for a, b in self.edges:
            outs[a] += 1
            ins[b] += 1
        return ins, outs

    # -- parities of the orientation letters ------------------------------

    def edge_parity(self):
        return (self.n - 1) % 2

    def int1_parity(self):
        return self.n % 2

    def type2_parity(self):
        return (self.n - 1) % 2

    def orientation_word(self):
        """Letters of the orientation word, in canonical reading order."""
        letters = [("E", i) for i in range(len(self.edges))]
        letters += [("I", v) for v in self.int_one()]
        if self.n == 2:
            letters += [("II", v) for v in self.order]
        else:
            letters += [("II", v) for v in self.int_two()]
        return letters

    def letter_parity(self):
        ep, ip, tp = self.edge_parity(), self.int1_parity(), self.type2_parity()

        def parity(letter):
            return {"E": ep, "I": ip, "II": tp, "STAR": tp}[letter[0]]

        return parity


def make_graph(n, r, ki, s, kw, edges, order=None):
    """Validate raw counts/edges/order into a ColoredGraph."""
    if n < 2:
        raise GraphError("ambient dimension must be >= 2")
    for name, c in (("r", r), ("ki", ki), ("s", s), ("kw", kw)):
        if c < 0:
            raise GraphError("negative count %s" % name)
    if n == 2 and order is None and s + kw == 0:
        order = ()
    g = ColoredGraph(n, r, ki, s, kw, tuple(tuple(e) for e in edges),
                     tuple(order) if order is not None else None)
    vs = set(g.vertices())
    for a, b in g.edges:
        if a not in vs:
            raise GraphError("unknown vertex %r" % a)
        if b not in vs:
            raise GraphError("unknown vertex %r" % b)
        if is_type_two(a):
            raise GraphError("type-II source edge %s>%s" % (a, b))
        if a == b:
            raise GraphError("self-loop at %s" % a)
    if n == 2:
        if g.order is None:
            raise GraphError("missing order (n=2)")
        if sorted(g.order, key=vertex_key) != sorted(g.type_two(), key=vertex_key) \
                or len(set(g.order)) != len(g.order):
            raise GraphError("order must be a permutation of the type II vertices")
    else:
        if g.order is not None:
            raise GraphError("order given for n>=3")
    return g


def degree(g):
    """Cohomological degree (n-1)E - n*kI - (n-1)*kII."""
    return (g.n - 1) * len(g.edges) - g.n * g.ki - (g.n - 1) * g.kw


# ---------------------------------------------------------------------------
# grammar


def serialize(g):
    parts = ["G%d" % g.n, "I%d+%d" % (g.r, g.ki), "II%d+%d" % (g.s, g.kw)]
    parts.append(",".join("%s>%s" % e for e in g.edges) if g.edges else "-")
    if g.order:
        parts.append("ord=" + ",".join(g.order))
    return ";".join(parts)


_TOKEN_KINDS = "xibw"


def _parse_vertex(tok, text, pos):
    if not tok or tok[0] not in _TOKEN_KINDS or not tok[1:].isdigit() or int(tok[1:]) < 1:
        raise ParseError("bad vertex token %r" % tok, text, pos)
    return tok


def parse(text):
    """Parse the graph grammar; inverse of serialize on canonical strings."""
    parts = text.split(";")
    if len(parts) not in (4, 5):
        raise ParseError("expected 4 or 5 ';'-separated fields", text, 0)
    pos = 0
    if not parts[0].startswith("G") or not parts[0][1:].isdigit():
        raise ParseError("bad dimension field", text, pos)
    n = int(parts[0][1:])
    pos += len(parts[0]) + 1

    def counts(fld, tag, pos):
        if not fld.startswith(tag):
            raise ParseError("expected %r field" % tag, text, pos)
        body = fld[len(tag):]
        if "+" not in body:
            raise ParseError("expected '+' in %r field" % tag, text, pos)
        a, b = body.split("+", 1)
        if not a.isdigit() or not b.isdigit():
            raise ParseError("bad counts in %r field" % tag, text, pos)
        return int(a), int(b)

    r, ki = counts(parts[1], "I", pos)
    pos += len(parts[1]) + 1
    s, kw = counts(parts[2], "II", pos)
    pos += len(parts[2]) + 1

    edges = []
    if parts[3] != "-":
        for tok in parts[3].split(","):
            if ">" not in tok:
                raise ParseError("edge %r lacks '>'" % tok, text, pos)
            a, b = tok.split(">", 1)
            edges.append((_parse_vertex(a, text, pos), _parse_vertex(b, text, pos)))
            pos += len(tok) + 1
    else:
        pos += 2

    order = None
    if len(parts) == 5:
        if not parts[4].startswith("ord="):
            raise ParseError("expected 'ord=' field", text, pos)
        body = parts[4][4:]
        order = tuple(_parse_vertex(t, text, pos) for t in body.split(",")) if body else ()

    try:
        return make_graph(n, r, ki, s, kw, edges, order)
    except GraphError as e:
        raise ParseError(str(e), text, 0) from e


# ---------------------------------------------------------------------------
# relabelling and canonical form


def relabel(g, map_i=None, map_w=None):
    """Rename internal vertices by the given token maps; returns (graph, sign).

    The sign is the Koszul sign relating the input instance to the
    renamed instance, i.e. [g] = sign * [relabelled].
    """
    map_i = map_i or {}
    map_w = map_w or {}
    full = {**map_i, **map_w}

    def m(v):
        return full.get(v, v)

    edges = tuple((m(a), m(b)) for a, b in g.edges)
    order = tuple(m(v) for v in g.order) if g.order is not None else None
    sign = 1
    if map_i and g.int1_parity():
        # permutation of the internal type I letters (index order)
        imgs = [int(map_i.get(v, v)[1:]) for v in g.int_one()]
        sign *= perm_sign(imgs)
    if map_w and g.n >= 3 and g.type2_parity():
        imgs = [int(map_w.get(v, v)[1:]) for v in g.int_two()]
        sign *= perm_sign(imgs)
    # n = 2: type II letters are carried by the order field; renaming is free.
    return ColoredGraph(g.n, g.r, g.ki, g.s, g.kw, edges, order), sign


def _refine_classes(g, color):
    """Iterative refinement; returns vertex -> invariant descriptor string.

    Descriptors are isomorphism-invariant: equal descriptors mark
    vertices that refinement cannot distinguish.
    """
    ins, outs = g.in_out()
    if g.n == 2:
        orderpos = {v: i for i, v in enumerate(g.order)}
    else:
        orderpos = {}
    cls = {}
    for v in g.vertices():
        ext = 0 if is_internal(v) else int(v[1:])
        if color == 1:
            # edge directions are pure orientation data in color 1
            cls[v] = repr((v[0], ext, ins[v] + outs[v], orderpos.get(v, -1)))
        else:
            cls[v] = repr((v[0], ext, ins[v], outs[v], orderpos.get(v, -1)))
    for _ in range(len(cls) + 1):
        nbr = {v: [] for v in cls}
        for a, b in g.edges:
            if color == 1:
                nbr[a].append(("*", cls[b]))
                nbr[b].append(("*", cls[a]))
            else:
                nbr[a].append(("o", cls[b]))
                nbr[b].append(("t", cls[a]))
        new_cls = {v: repr((cls[v], tuple(sorted(nbr[v])))) for v in cls}
        if len(set(new_cls.values())) == len(set(cls.values())):
            break
        cls = new_cls
    return cls


def _normalize_order_names(g):
    """n=2: rename internal type II vertices by their order position."""
    seq = [v for v in g.order if v[0] == "w"]
    map_w = {v: "w%d" % (i + 1) for i, v in enumerate(seq)}
    return relabel(g, map_w=map_w)  # sign is +1 by convention


def _oriented_sorted(g, color):
    """Canonically orient (color 1) and sort the edge list; (graph, sign)."""
    sign = 1
    edges = list(g.edges)
    if color == 1:
        flips = 0
        for i, (a, b) in enumerate(edges):
            if vertex_key(a) > vertex_key(b):
                edges[i] = (b, a)
                flips += 1
        if g.n % 2 and flips % 2:
            sign = -sign
    idx = sorted(range(len(edges)),
                 key=lambda i: (vertex_key(edges[i][0]), vertex_key(edges[i][1]), i))
    if g.edge_parity():
        sign *= perm_sign(idx)
    edges = tuple(edges[i] for i in idx)
    return ColoredGraph(g.n, g.r, g.ki, g.s, g.kw, edges, g.order), sign


@dataclass(frozen=True)
class CanonicalGraph:
    """Canonical representative of an isomorphism class, plus a color tag."""

    color: int
    key: str

    def graph(self):
        return parse(self.key)

    def __lt__(self, other):
        return (self.color, self.key) < (other.color, other.key)

    def __repr__(self):
        return "Canon(c%d,%s)" % (self.color, self.key)


@functools.lru_cache(maxsize=1 << 20)
def canonicalize(g, color):
    """Canonical form and relating sign: [g] = sign * [canonical].

    Sign 0 means the instance carries an orientation-reversing
    automorphism and therefore vanishes.
    """
    if color not in (1, 2):
        raise GraphError("color must be 1 or 2")
    if color == 1 and (g.s or g.kw):
        raise GraphError("color-1 graph has type II vertices")

    base, base_sign = (_normalize_order_names(g) if g.n == 2 else (g, 1))

    cls = _refine_classes(base, color)

    def tie_groups(tokens):
        """Sort by descriptor, name by rank; ties remain permutable."""
        ranked = sorted(tokens, key=lambda v: (cls[v], vertex_key(v)))
        groups = []
        for j, v in enumerate(ranked):
            if j and cls[v] == cls[ranked[j - 1]]:
                groups[-1].append(j)
            else:
                groups.append([j])
        return ranked, groups

    ranked_i, groups_i = tie_groups(base.int_one())
    if base.n >= 3:
        ranked_w, groups_w = tie_groups(base.int_two())
    else:
        ranked_w, groups_w = [], []

    perm_space = [list(itertools.permutations(grp)) for grp in groups_i + groups_w]
    n_groups_i = len(groups_i)
    best_key = None
    best_signs = set()
    for assignment in itertools.product(*perm_space):
        slots_i = list(range(len(ranked_i)))
        slots_w = list(range(len(ranked_w)))
        for gi, img in enumerate(assignment):
            grp = (groups_i + groups_w)[gi]
            slots = slots_i if gi < n_groups_i else slots_w
            for src_pos, dst_pos in zip(grp, img):
                slots[src_pos] = dst_pos
        map_i = {v: "i%d" % (slots_i[j] + 1) for j, v in enumerate(ranked_i)}
        map_w = {v: "w%d" % (slots_w[j] + 1) for j, v in enumerate(ranked_w)}
        h, s1 = relabel(base, map_i, map_w)
        h, s2 = _oriented_sorted(h, color)
        key = serialize(h)
        sign = base_sign * s1 * s2
        if best_key is None or key < best_key:
            best_key = key
            best_signs = {sign}
        elif key == best_key:
            best_signs.add(sign)

    if len(best_signs) > 1:
        return CanonicalGraph(color, best_key), 0
    # a repeated edge is its own transposition; kills the class when edges are odd
    canon = parse(best_key)
    if canon.edge_parity() and len(set(canon.edges)) != len(canon.edges):
        return CanonicalGraph(color, best_key), 0
    return CanonicalGraph(color, best_key), next(iter(best_signs))


# ---------------------------------------------------------------------------
# connectivity and reduced variants


def connected_components(g, clusters=None):
    """Vertex partition into components; `clusters` pre-merges vertex groups.

    When given, clusters must cover each internal type II vertex exactly
    once (external vertices may additionally appear, at most once).
    """
    parent = {v: v for v in g.vertices()}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    if clusters is not None:
        seen = []
        for group in clusters:
            group = list(group)
            for v in group:
                if v not in parent:
                    raise GraphError("unknown vertex %r in cluster" % v)
                if not is_type_two(v):
                    raise GraphError("cluster vertex %r is not type II" % v)
                seen.append(v)
            for a, b in zip(group, group[1:]):
                union(a, b)
        internal = [v for v in seen if v[0] == "w"]
        if sorted(internal, key=vertex_key) != sorted(g.int_two(), key=vertex_key) \
                or len(seen) != len(set(seen)):
            raise GraphError("clusters must partition the internal type II vertices")
    for a, b in g.edges:
        union(a, b)
    comps = {}
    for v in g.vertices():
        comps.setdefault(find(v), []).append(v)
    return [sorted(c, key=vertex_key) for c in
            sorted(comps.values(), key=lambda c: vertex_key(min(c, key=vertex_key)))]


def is_externally_connected(g, clusters=None):
    """True when every component touches an external vertex."""
    for comp in connected_components(g, clusters):
        if all(is_internal(v) for v in comp):
            return False
    return True


def is_reduced(g, variant, color):
    """Does g survive in the requested (full or reduced) model variant?"""
    if variant == "full":
        return True
    if variant != "reduced":
        raise GraphError("unknown variant %r" % variant)
    val = g.valences()
    ins, outs = g.in_out()
    if color == 1:
        return all(val[v] >= 3 for v in g.int_one())
    for v in g.int_one():
        if val[v] < 2:
            return False
        if ins[v] == 1 and outs[v] == 1:
            return False
    for v in g.int_two():
        if val[v] < 2:
            return False
    return True
