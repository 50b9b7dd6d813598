"""The n=2 Lie-decorated basis and the boundary quotient.

A decorated graph packs the type II vertices of an (unordered) n=2
graph into a sequence of formal Lie monomials; the external type II
vertices must read 1..s across the concatenated leaf word.  Expanding
brackets and shuffling the purely internal monomials into the word
realizes decorated graphs inside the ordered-graph basis; this is a
change of basis, and "externally disconnected" is detected on the
decorated side (monomial leaves count as one cluster).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .basisgen import iter_edge_structures
from .graphs import GraphError, is_internal, koszul_sign, make_graph, vertex_key
from .vectors import GraphVector

# A Lie monomial is a leaf token or a pair (left, right).


def leaves(tree):
    if isinstance(tree, str):
        return [tree]
    return leaves(tree[0]) + leaves(tree[1])


def serialize_monomial(tree):
    if isinstance(tree, str):
        return tree
    return "[%s,%s]" % (serialize_monomial(tree[0]), serialize_monomial(tree[1]))


def parse_monomial(text):
    pos = 0

    def rec():
        nonlocal pos
        if pos < len(text) and text[pos] == "[":
            pos += 1
            left = rec()
            if text[pos] != ",":
                raise GraphError("bad bracket at %d in %r" % (pos, text))
            pos += 1
            right = rec()
            if text[pos] != "]":
                raise GraphError("bad bracket at %d in %r" % (pos, text))
            pos += 1
            return (left, right)
        start = pos
        while pos < len(text) and text[pos] not in ",]":
            pos += 1
        return text[start:pos]

    tree = rec()
    if pos != len(text):
        raise GraphError("trailing input in %r" % text)
    return tree


def expand_monomial(tree):
    """Signed words of the bracket expansion; type II letters are odd."""
    if isinstance(tree, str):
        return [(1, (tree,))]
    out = []
    for sa, wa in expand_monomial(tree[0]):
        for sb, wb in expand_monomial(tree[1]):
            out.append((sa * sb, wa + wb))
            flip = -1 if (len(wa) * len(wb)) % 2 else 1
            out.append((-flip * sa * sb, wb + wa))
    return out


def shuffle_words(u, v):
    """Signed interleavings of two odd-letter words (orders preserved)."""
    parity = lambda letter: 1
    base = list(u) + list(v)
    out = []
    for merged in _interleave(list(u), list(v)):
        out.append((koszul_sign(base, merged, parity), tuple(merged)))
    return out


def _interleave(xs, ys):
    if not xs:
        yield list(ys)
        return
    if not ys:
        yield list(xs)
        return
    for rest in _interleave(xs[1:], ys):
        yield [xs[0]] + rest
    for rest in _interleave(xs, ys[1:]):
        yield [ys[0]] + rest


@dataclass(frozen=True)
class LieDecoratedGraph:
    """An unordered n=2 graph plus a monomial sequence over its type II
    vertices (externals reading 1..s along the concatenated leaf word)."""

    r: int
    ki: int
    s: int
    kw: int
    edges: tuple
    monomials: tuple  # tuple of monomial trees

    def __post_init__(self):
        word = [v for m in self.monomials for v in leaves(m)]
        todo = sorted(word, key=vertex_key)
        want = ["b%d" % i for i in range(1, self.s + 1)] + \
               ["w%d" % i for i in range(1, self.kw + 1)]
        if todo != want:
            raise GraphError("monomial leaves must cover the type II vertices")

    def key(self):
        mono = "*".join(serialize_monomial(m) for m in self.monomials)
        base = make_graph(2, self.r, self.ki, self.s, self.kw, self.edges,
                          tuple(v for m in self.monomials for v in leaves(m)))
        from .graphs import serialize
        plain = serialize(base).rsplit(";ord=", 1)[0]
        return plain + ";lie=" + mono if mono else plain

    def degree(self):
        return len(self.edges) - 2 * self.ki - self.kw

    def expand(self):
        """The ordered-graph vector realizing this decorated graph."""
        ext_blocks = []
        int_blocks = []
        for m in self.monomials:
            if any(v[0] == "b" for v in leaves(m)):
                ext_blocks.append(m)
            else:
                int_blocks.append(m)
        skeleton = [(1, ())]
        for m in ext_blocks:
            skeleton = [(s0 * sm, w0 + wm)
                        for s0, w0 in skeleton
                        for sm, wm in expand_monomial(m)]
        words = skeleton
        for m in int_blocks:
            new = []
            for s0, w0 in words:
                for sm, wm in expand_monomial(m):
                    for sh, merged in shuffle_words(w0, wm):
                        new.append((s0 * sm * sh, merged))
            words = new
        out = GraphVector(2, 2, self.r, self.s)
        for sgn, word in words:
            g = make_graph(2, self.r, self.ki, self.s, self.kw,
                           self.edges, word)
            out.add_term(g, sgn)
        return out

    def is_externally_disconnected(self):
        parent = {}
        tokens = (["x%d" % i for i in range(1, self.r + 1)]
                  + ["i%d" % i for i in range(1, self.ki + 1)]
                  + ["b%d" % i for i in range(1, self.s + 1)]
                  + ["w%d" % i for i in range(1, self.kw + 1)])
        for v in tokens:
            parent[v] = v

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        for a, b in self.edges:
            union(a, b)
        for m in self.monomials:
            ls = leaves(m)
            for a, b in zip(ls, ls[1:]):
                union(a, b)
        comps = {}
        for v in tokens:
            comps.setdefault(find(v), []).append(v)
        return any(all(is_internal(v) for v in comp) for comp in comps.values())


def _normal_brackets(block):
    """Left-normed combs over the block with its minimal leaf first."""
    block = sorted(block, key=vertex_key)
    head, rest = block[0], block[1:]
    for perm in itertools.permutations(rest):
        tree = head
        for leaf in perm:
            tree = (tree, leaf)
        yield tree


def _monomial_sequences(ext2, int2):
    """Decorated monomial sequences covering the given type II tokens."""
    tokens = list(ext2) + list(int2)
    if not tokens:
        yield ()
        return
    for partition in _set_partitions(tokens):
        per_block = []
        for block in partition:
            per_block.append(list(_normal_brackets(block)))
        for choice in itertools.product(*per_block):
            ext_blocks = [m for m in choice if any(v[0] == "b" for v in leaves(m))]
            int_blocks = [m for m in choice if all(v[0] == "w" for v in leaves(m))]
            # canonical sequence: blocks commute up to sign, so fix one order
            ext_blocks.sort(key=lambda m: vertex_key(
                min((v for v in leaves(m) if v[0] == "b"), key=vertex_key)))
            int_blocks.sort(key=lambda m: [vertex_key(v) for v in leaves(m)])
            yield tuple(ext_blocks + int_blocks)


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _fingerprint(vec):
    """Scale-normalized term list; identifies decorated elements."""
    items = vec.items()
    if not items:
        return None, None
    lead = items[0][1]
    return tuple((k, c / lead) for k, c in items), lead


@functools.lru_cache(maxsize=4096)
def decorated_basis(r, s, ki, kw, n_edges, variant="full"):
    """Distinct decorated basis elements with the exact counts.

    Returns a list of (LieDecoratedGraph, GraphVector expansion).
    """
    from .graphs import is_reduced
    ext2 = ["b%d" % i for i in range(1, s + 1)]
    int2 = ["w%d" % i for i in range(1, kw + 1)]
    seen = {}
    out = []
    for edges in iter_edge_structures(2, 2, r, s, ki, kw, n_edges, variant,
                                      order_free_ii=True):
        if variant == "reduced":
            probe = make_graph(2, r, ki, s, kw, edges,
                               tuple(ext2) + tuple(int2))
            if not is_reduced(probe, "reduced", 2):
                continue
        for monos in _monomial_sequences(ext2, int2):
            try:
                dec = LieDecoratedGraph(r, ki, s, kw, tuple(edges), monos)
            except GraphError:
                continue
            vec = dec.expand()
            fp, _ = _fingerprint(vec)
            if fp is None or fp in seen:
                continue
            # the same span member may appear with scaled expansions; also
            # guard against the negated fingerprint
            neg, _ = _fingerprint(vec.scale(-1))
            seen[fp] = True
            seen[neg] = True
            out.append((dec, vec))
    return out


def pbw_expand(dec):
    """Ordered-graph expansion of a decorated graph."""
    return dec.expand()


def _solve_coords(targets, vec):
    """Exact coordinates of vec in the span of target vectors."""
    keys = sorted({k for t in targets for k in t.terms} | set(vec.terms))
    index = {k: i for i, k in enumerate(keys)}
    rows = [[Fraction(0)] * len(targets) + [Fraction(0)] for _ in keys]
    for j, t in enumerate(targets):
        for k, c in t.terms.items():
            rows[index[k]][j] = c
    for k, c in vec.terms.items():
        rows[index[k]][-1] = c
    ncols = len(targets)
    pivots = []
    rank_row = 0
    for col in range(ncols):
        piv = None
        for i in range(rank_row, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[rank_row], rows[piv] = rows[piv], rows[rank_row]
        inv = Fraction(1) / rows[rank_row][col]
        rows[rank_row] = [c * inv for c in rows[rank_row]]
        for i in range(len(rows)):
            if i != rank_row and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank_row])]
        pivots.append(col)
        rank_row += 1
    for i in range(rank_row, len(rows)):
        if rows[i][-1]:
            raise GraphError("vector outside the decorated span")
    coords = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        coords[col] = rows[i][-1]
    return coords


def to_decorated_basis(x):
    """Decorated coordinates of an ordered-graph vector.

    Returns a list of (LieDecoratedGraph, coefficient).
    """
    if x.n != 2 or x.color != 2:
        raise GraphError("the decorated basis exists for n=2, color 2 only")
    blocks = {}
    for key, coeff in x.terms.items():
        g = key.graph()
        blocks.setdefault((g.ki, g.kw, len(g.edges)), []).append((key, coeff))
    out = []
    for (ki, kw, ne), terms in sorted(blocks.items()):
        sub = GraphVector(2, 2, x.r, x.s, terms)
        basis = decorated_basis(x.r, x.s, ki, kw, ne)
        coords = _solve_coords([vec for _, vec in basis], sub)
        for (dec, _), c in zip(basis, coords):
            if c:
                out.append((dec, c))
    return out


def is_externally_disconnected(g, n, decoration=None):
    """Disconnectedness test; n=2 requires the decorated form."""
    if n >= 3:
        from .graphs import is_externally_connected
        return not is_externally_connected(g)
    if decoration is None:
        raise GraphError("missing decoration for n=2")
    return decoration.is_externally_disconnected()


def project_quotient(x, n=None):
    """Kill the externally disconnected span (Lie-decorated sense at n=2)."""
    n = n if n is not None else x.n
    if n >= 3:
        out = GraphVector(x.n, x.color, x.r, x.s)
        from .graphs import is_externally_connected
        for key, coeff in x.terms.items():
            if is_externally_connected(key.graph()):
                out.add_term(key, coeff)
        return out
    out = GraphVector(2, 2, x.r, x.s)
    for dec, coeff in to_decorated_basis(x):
        if not dec.is_externally_disconnected():
            out = out + dec.expand().scale(coeff)
    return out
