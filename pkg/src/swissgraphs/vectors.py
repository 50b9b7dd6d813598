"""Exact linear combinations of canonical graphs."""

from __future__ import annotations

from fractions import Fraction

from .graphs import GraphError, CanonicalGraph, ColoredGraph, canonicalize


class ArityError(GraphError):
    """Mixed (n, color, r, s) metadata."""


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    return c  # symbolic coefficients (WeightPoly) pass through


class GraphVector:
    """Finite sum of canonical graphs with exact coefficients.

    Zero coefficients are never stored.  All keys share one
    (n, color, r, s); a fresh vector adopts the metadata of its first
    nonzero term and subsequent terms must match.
    """

    __slots__ = ("n", "color", "r", "s", "terms")

    def __init__(self, n, color, r, s, terms=None):
        self.n = n
        self.color = color
        self.r = r
        self.s = s
        self.terms = {}
        if terms:
            for k, c in (terms.items() if isinstance(terms, dict) else terms):
                self.add_term(k, c)

    def _check(self, key):
        g = key.graph()
        if key.color != self.color or g.n != self.n or g.r != self.r or g.s != self.s:
            raise ArityError("term %r does not match (n=%d,color=%d,r=%d,s=%d)"
                             % (key, self.n, self.color, self.r, self.s))

    def add_term(self, key, coeff):
        """Accumulate coeff * key; key may be a raw graph (canonicalized here)."""
        coeff = _as_fraction(coeff)
        if not coeff:
            return
        if isinstance(key, ColoredGraph):
            key, sign = canonicalize(key, self.color)
            if sign == 0:
                return
            coeff = coeff * sign
        self._check(key)
        new = self.terms.get(key, 0) + coeff
        if new:
            self.terms[key] = new
        else:
            self.terms.pop(key, None)

    def copy(self):
        v = GraphVector(self.n, self.color, self.r, self.s)
        v.terms = dict(self.terms)
        return v

    def items(self):
        return sorted(self.terms.items())

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, GraphVector):
            return NotImplemented
        return (self.n, self.color, self.r, self.s) == (other.n, other.color, other.r, other.s) \
            and self.terms == other.terms

    def __add__(self, other):
        self._match(other)
        v = self.copy()
        for k, c in other.terms.items():
            v.add_term(k, c)
        return v

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = _as_fraction(c)
        v = GraphVector(self.n, self.color, self.r, self.s)
        if c:
            for k, co in self.terms.items():
                prod = co * c
                if prod:
                    v.terms[k] = prod
        return v

    def _match(self, other):
        if (self.n, self.color, self.r, self.s) != (other.n, other.color, other.r, other.s):
            raise ArityError("arity mismatch")

    def __repr__(self):
        if not self.terms:
            return "GraphVector(0)"
        return " + ".join("(%s)*%s" % (c, k.key) for k, c in self.items())


def vector_of(g, color, coeff=1):
    """Single-term vector of a raw graph."""
    v = GraphVector(g.n, color, g.r, g.s)
    v.add_term(g, coeff)
    return v


class TensorVector:
    """Linear combination of ordered pairs of canonical graphs."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for k, c in (terms.items() if isinstance(terms, dict) else terms):
                self.add_term(k[0], k[1], c)

    def add_term(self, left, right, coeff):
        coeff = _as_fraction(coeff)
        if not coeff:
            return
        key = (left, right)
        new = self.terms.get(key, 0) + coeff
        if new:
            self.terms[key] = new
        else:
            self.terms.pop(key, None)

    def items(self):
        return sorted(self.terms.items())

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TensorVector):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other):
        t = TensorVector()
        t.terms = dict(self.terms)
        for (l, r), c in other.terms.items():
            t.add_term(l, r, c)
        return t

    def scale(self, c):
        c = _as_fraction(c)
        t = TensorVector()
        if c:
            for k, co in self.terms.items():
                prod = co * c
                if prod:
                    t.terms[k] = prod
        return t

    def __sub__(self, other):
        return self + other.scale(-1)

    def __repr__(self):
        if not self.terms:
            return "TensorVector(0)"
        return " + ".join("(%s)*%s(x)%s" % (c, l.key, r.key)
                          for (l, r), c in self.items())
