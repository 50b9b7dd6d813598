"""Truncated bases, exact ranks, Betti tables, and spectral pages."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .basisgen import iter_basis_graphs
from .differential import (CONTRACTION, FULL, DifferentialConfig, WeightSystem,
                           apply_diff, builtin_weights)
from .graphs import CanonicalGraph, GraphError, degree, is_externally_connected
from .vectors import GraphVector


@dataclass(frozen=True)
class Bounds:
    max_int1: int
    max_int2: int
    max_total: int
    max_edges: int

    def admits(self, g):
        return (g.ki <= self.max_int1 and g.kw <= self.max_int2
                and g.ki + g.kw <= self.max_total
                and len(g.edges) <= self.max_edges)

    def shrink(self):
        return Bounds(self.max_int1 - 1, self.max_int2 - 1,
                      self.max_total - 1, self.max_edges - 1)

    def grow(self):
        return Bounds(self.max_int1 + 1, self.max_int2 + 1,
                      self.max_total + 1, self.max_edges + 1)


@dataclass
class BasisSlice:
    n: int
    color: int
    r: int
    s: int
    bounds: Bounds
    variant: str
    quotient: bool
    degrees: dict  # degree -> list of elements (CanonicalGraph or decorated)

    def dims(self):
        return {k: len(v) for k, v in sorted(self.degrees.items())}

    def excess(self, element):
        g = element.graph() if isinstance(element, CanonicalGraph) else None
        if g is None or self.color != 1:
            raise GraphError("excess is a color-1 notion")
        return len(g.edges) - g.ki


@dataclass
class CoordinateMatrix:
    rows: int
    cols: int
    entries: dict  # (row, col) -> Fraction
    leaving: list = field(default_factory=list)  # flagged out-of-truncation terms

    def column(self, j):
        return {i: c for (i, jj), c in self.entries.items() if jj == j}

    def transpose_rows(self):
        """row index -> {col: coeff}."""
        rows = {}
        for (i, j), c in self.entries.items():
            rows.setdefault(i, {})[j] = c
        return rows

    def to_text(self):
        lines = ["%d %d %d" % (self.rows, self.cols, len(self.entries))]
        for (i, j), c in sorted(self.entries.items()):
            lines.append("%d %d %s" % (i, j, c))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        r, c, nnz = (int(t) for t in lines[0].split())
        entries = {}
        for ln in lines[1:]:
            i, j, val = ln.split()
            entries[(int(i), int(j))] = Fraction(val)
        if len(entries) != nnz:
            raise GraphError("bad coordinate matrix: nnz mismatch")
        return cls(r, c, entries)


@dataclass
class BettiEntry:
    dim: int
    stable: bool


@dataclass
class BettiTable:
    entries: dict  # degree -> BettiEntry

    def dims(self):
        return {k: e.dim for k, e in sorted(self.entries.items())}

    def stable_dims(self):
        return {k: e.dim for k, e in sorted(self.entries.items()) if e.stable}


# ---------------------------------------------------------------------------
# exact linear algebra


def _mod_value(frac, p):
    num = frac.numerator % p
    den = frac.denominator % p
    if den == 0:
        raise ZeroDivisionError
    return num * pow(den, -1, p) % p


def rank_mod(matrix, p):
    rows = {}
    for (i, j), c in matrix.entries.items():
        v = _mod_value(c, p)
        if v:
            rows.setdefault(i, {})[j] = v
    rank = 0
    pivots = {}
    for i in sorted(rows):
        row = rows[i]
        while row:
            col = min(row)
            if col in pivots:
                prow = pivots[col]
                f = row[col]
                for jc, vc in prow.items():
                    nv = (row.get(jc, 0) - f * vc) % p
                    if nv:
                        row[jc] = nv
                    else:
                        row.pop(jc, None)
            else:
                inv = pow(row[col], -1, p)
                row = {jc: (vc * inv) % p for jc, vc in row.items()}
                pivots[col] = row
                rank += 1
                break
    return rank


def rank_exact(matrix):
    rows = list(matrix.transpose_rows().values())
    rank = 0
    pivots = {}
    for row in rows:
        row = dict(row)
        while row:
            col = min(row)
            if col in pivots:
                prow = pivots[col]
                f = row[col]
                for jc, vc in prow.items():
                    nv = row.get(jc, Fraction(0)) - f * vc
                    if nv:
                        row[jc] = nv
                    else:
                        row.pop(jc, None)
            else:
                inv = Fraction(1) / row[col]
                row = {jc: vc * inv for jc, vc in row.items()}
                pivots[col] = row
                rank += 1
                break
    return rank


def _is_probable_prime(x):
    if x < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if x % sp == 0:
            return x == sp
    d = x - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        y = pow(a, d, x)
        if y in (1, x - 1):
            continue
        for _ in range(r - 1):
            y = y * y % x
            if y == x - 1:
                break
        else:
            return False
    return True


def rank_primes(seed=2_000_003):
    """Two reproducible random primes near 2^62."""
    rng = random.Random(seed)
    primes = []
    while len(primes) < 2:
        cand = rng.randrange(1 << 62, 1 << 63) | 1
        if _is_probable_prime(cand) and cand not in primes:
            primes.append(cand)
    return tuple(primes)


def rank(matrix, seed=2_000_003):
    """Exact rank: two modular runs cross-checked, rational fallback."""
    if not matrix.entries:
        return 0
    p1, p2 = rank_primes(seed)
    try:
        r1 = rank_mod(matrix, p1)
        r2 = rank_mod(matrix, p2)
    except ZeroDivisionError:
        return rank_exact(matrix)
    if r1 != r2:
        return rank_exact(matrix)
    return r1


def compose_is_zero(m2, m1):
    """Exact check that m2 * m1 = 0."""
    if m1.cols == 0 or m2.rows == 0:
        return True
    cols1 = {}
    for (i, j), c in m1.entries.items():
        cols1.setdefault(j, {})[i] = c
    rows2 = m2.transpose_rows()
    by_col2 = {}
    for (i, j), c in m2.entries.items():
        by_col2.setdefault(j, {})[i] = c
    for j, col in cols1.items():
        acc = {}
        for mid, c1 in col.items():
            for i, c2 in by_col2.get(mid, {}).items():
                acc[i] = acc.get(i, Fraction(0)) + c2 * c1
        if any(acc.values()):
            return False
    return True


# ---------------------------------------------------------------------------
# complexes


class GraphComplex:
    """A truncated graded complex with its differential matrices."""

    def __init__(self, n, color, r, s, bounds, variant="full", quotient=False,
                 weights=None, cfg=None):
        self.n = n
        self.color = color
        self.r = r
        self.s = s
        self.bounds = bounds
        self.variant = variant
        self.quotient = quotient
        if cfg is None:
            cfg = FULL if weights is not None else CONTRACTION
        self.cfg = DifferentialConfig(cfg.pieces, variant)
        self.weights = weights
        self.decorated = (n == 2 and color == 2 and quotient)
        self._build()

    # -- basis ------------------------------------------------------------

    def _build(self):
        self.degrees = {}
        if self.decorated:
            from .liebasis import decorated_basis
            self._dec_elements = []
            for ki in range(self.bounds.max_int1 + 1):
                for kw in range(self.bounds.max_int2 + 1):
                    if ki + kw > self.bounds.max_total:
                        continue
                    for ne in range(self.bounds.max_edges + 1):
                        for dec, vec in decorated_basis(self.r, self.s, ki, kw,
                                                        ne, self.variant):
                            if dec.is_externally_disconnected():
                                continue
                            self.degrees.setdefault(dec.degree(), []).append(
                                (dec, vec))
        else:
            for key in iter_basis_graphs(
                    self.n, self.color, self.r, self.s,
                    max_int1=self.bounds.max_int1,
                    max_int2=self.bounds.max_int2,
                    max_total=self.bounds.max_total,
                    max_edges=self.bounds.max_edges,
                    variant=self.variant, quotient=self.quotient):
                self.degrees.setdefault(degree(key.graph()), []).append(key)
        for k in self.degrees:
            self.degrees[k].sort(key=self._sort_key)
        self._matrices = {}

    @staticmethod
    def _sort_key(el):
        if isinstance(el, CanonicalGraph):
            return el.key
        return el[0].key()

    def basis_slice(self):
        return BasisSlice(self.n, self.color, self.r, self.s, self.bounds,
                          self.variant, self.quotient,
                          {k: list(v) for k, v in self.degrees.items()})

    def dims(self):
        return {k: len(v) for k, v in sorted(self.degrees.items())}

    # -- differential -------------------------------------------------------

    def _apply(self, element):
        """GraphVector image of a basis element under the differential."""
        if self.decorated:
            dec, vec = element
            image = apply_diff(vec, self.weights, self.cfg)
            return image
        v = GraphVector(self.n, self.color, self.r, self.s,
                        [(element, Fraction(1))])
        image = apply_diff(v, self.weights, self.cfg)
        if self.quotient and self.color == 1:
            out = GraphVector(self.n, self.color, self.r, self.s)
            for key, c in image.terms.items():
                if is_externally_connected(key.graph()):
                    out.add_term(key, c)
            return out
        if self.quotient and self.color == 2 and self.n >= 3:
            out = GraphVector(self.n, self.color, self.r, self.s)
            for key, c in image.terms.items():
                if is_externally_connected(key.graph()):
                    out.add_term(key, c)
            return out
        return image

    def _coords(self, image, target_degree):
        """Coordinates of an image vector in the target-degree basis."""
        basis = self.degrees.get(target_degree, [])
        leaving = []
        if self.decorated:
            from .graphs import is_reduced, make_graph
            from .liebasis import to_decorated_basis
            coords = {}
            index = {}
            for pos, (dec, _vec) in enumerate(basis):
                index[dec] = pos
            for dec, c in to_decorated_basis(image):
                if dec.is_externally_disconnected():
                    continue
                if self.variant == "reduced":
                    probe = make_graph(2, dec.r, dec.ki, dec.s, dec.kw,
                                       dec.edges,
                                       tuple("b%d" % i for i in range(1, dec.s + 1))
                                       + tuple("w%d" % i for i in range(1, dec.kw + 1)))
                    if not is_reduced(probe, "reduced", 2):
                        continue
                if dec in index:
                    coords[index[dec]] = coords.get(index[dec], Fraction(0)) + c
                else:
                    leaving.append((dec.key(), c))
            return coords, leaving
        index = {key: pos for pos, key in enumerate(basis)}
        coords = {}
        for key, c in image.terms.items():
            if key in index:
                coords[index[key]] = c
            else:
                g = key.graph()
                if self.quotient and not is_externally_connected(g):
                    continue
                if self.variant == "reduced":
                    from .graphs import is_reduced
                    if not is_reduced(g, "reduced", self.color):
                        continue
                leaving.append((key.key, c))
        return coords, leaving

    def matrix(self, deg):
        """CoordinateMatrix of d: degree -> degree + 1."""
        if deg in self._matrices:
            return self._matrices[deg]
        domain = self.degrees.get(deg, [])
        codomain = self.degrees.get(deg + 1, [])
        entries = {}
        leaving = []
        for j, el in enumerate(domain):
            image = self._apply(el)
            coords, left = self._coords(image, deg + 1)
            for i, c in coords.items():
                if c:
                    entries[(i, j)] = c
            leaving.extend(left)
        m = CoordinateMatrix(len(codomain), len(domain), entries, leaving)
        self._matrices[deg] = m
        return m

    # -- homology ------------------------------------------------------------

    def betti(self, seed=2_000_003):
        degs = sorted(self.degrees)
        if not degs:
            return BettiTable({})
        ranks = {}
        for k in degs:
            m = self.matrix(k)
            if m.leaving:
                raise GraphError("image leaves truncation: %r" % m.leaving[:3])
            ranks[k] = rank(m, seed)
        for k in degs:
            if k + 1 in self.degrees:
                if not compose_is_zero(self.matrix(k + 1), self.matrix(k)):
                    raise GraphError("d^2 != 0 in truncation at degree %d" % k)
        inner = self.bounds.shrink()
        entries = {}
        for k in degs:
            dim_k = len(self.degrees[k])
            h = dim_k - ranks.get(k, 0) - ranks.get(k - 1, 0)
            stable = True
            for kk in (k - 1, k, k + 1):
                for el in self.degrees.get(kk, []):
                    g = el.graph() if isinstance(el, CanonicalGraph) else None
                    if g is None:
                        dec = el[0]
                        total = dec.ki + dec.kw
                        ne = len(dec.edges)
                        if total > inner.max_total or ne > inner.max_edges:
                            stable = False
                            break
                    else:
                        if not inner.admits(g):
                            stable = False
                            break
                if not stable:
                    break
            entries[k] = BettiEntry(h, stable)
        return BettiTable(entries)


# ---------------------------------------------------------------------------
# per-excess color-1 cohomology (finite, exact)


def color1_betti(n, r, max_excess, seed=2_000_003):
    """H(reduced, externally connected color-1 complex), exact per excess.

    Per fixed excess e = E - kI the reduced connected slice is finite
    (3 kI <= 2 E); the contraction differential preserves e, so the
    Betti numbers need no truncation flags.
    """
    total = {}
    for e in range(max_excess + 1):
        perdeg = {}
        for ki in range(0, 2 * e + 1):
            ne = ki + e
            for key in iter_basis_graphs(n, 1, r, 0, max_int1=ki, max_int2=0,
                                         max_edges=ne, variant="reduced",
                                         quotient=True,
                                         exact_counts=(ki, 0, ne)):
                perdeg.setdefault(degree(key.graph()), []).append(key)
        degs = sorted(perdeg)
        ranks = {}
        for k in degs:
            domain = perdeg[k]
            codomain = {key: i for i, key in enumerate(perdeg.get(k + 1, []))}
            entries = {}
            for j, el in enumerate(domain):
                v = GraphVector(n, 1, r, 0, [(el, Fraction(1))])
                image = apply_diff(v, None,
                                   DifferentialConfig("contraction", "reduced"))
                for key, c in image.terms.items():
                    if not is_externally_connected(key.graph()):
                        continue
                    if key not in codomain:
                        raise GraphError("contraction left the excess slice")
                    entries[(codomain[key], j)] = c
            ranks[k] = rank(CoordinateMatrix(len(perdeg.get(k + 1, [])),
                                             len(domain), entries), seed)
        for k in degs:
            h = len(perdeg[k]) - ranks.get(k, 0) - ranks.get(k - 1, 0)
            if h:
                total[k] = total.get(k, 0) + h
    return dict(sorted(total.items()))


# ---------------------------------------------------------------------------
# oracles


def poly_mul(a, b):
    out = {}
    for i, ca in a.items():
        for j, cb in b.items():
            out[i + j] = out.get(i + j, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


def oracle_conf_poincare(n, r):
    """Poincare polynomial of the configuration-space cohomology in r slots."""
    if r < 0:
        raise GraphError("negative arity")
    poly = {0: 1}
    for i in range(1, r):
        poly = poly_mul(poly, {0: 1, n - 1: i})
    return poly


def poisson_monomial_dims(n, r):
    """Independent oracle: dimensions of multilinear free Poisson monomials.

    Monomials are products of bracket monomials over a set partition of
    the r slots; a block of size k contributes (k-1)! independent
    brackets in degree (k-1)(n-1).
    """
    import math
    from .liebasis import _set_partitions
    dims = {}
    for part in _set_partitions(list(range(1, r + 1))):
        deg = sum((len(b) - 1) * (n - 1) for b in part)
        count = 1
        for b in part:
            count *= math.factorial(len(b) - 1)
        dims[deg] = dims.get(deg, 0) + count
    return {k: v for k, v in sorted(dims.items()) if v}


def oracle_swiss_poincare(n, r, s):
    """Cohomology Poincare polynomial of the boundary-touching arity (r,s)."""
    if n < 2:
        raise GraphError("n must be >= 2")
    if n >= 3:
        return poly_mul(oracle_conf_poincare(n, r),
                        oracle_conf_poincare(n - 1, s))
    import math
    base = oracle_conf_poincare(2, r)
    return {k: math.factorial(s) * v for k, v in base.items()}


# ---------------------------------------------------------------------------
# spectral sequence of the internal-vertex filtration


def _rref(rows, width):
    """Reduced row echelon form; returns (pivot_cols, rows)."""
    rows = [dict(r) for r in rows if r]
    pivots = []
    reduced = []
    for row in rows:
        row = dict(row)
        for pc, prow in zip(pivots, reduced):
            if pc in row:
                f = row[pc]
                for jc, vc in prow.items():
                    nv = row.get(jc, Fraction(0)) - f * vc
                    if nv:
                        row[jc] = nv
                    else:
                        row.pop(jc, None)
        if not row:
            continue
        col = min(row)
        inv = Fraction(1) / row[col]
        row = {jc: vc * inv for jc, vc in row.items()}
        # back-substitute
        for idx, (pc, prow) in enumerate(zip(pivots, reduced)):
            if col in prow:
                f = prow[col]
                newr = dict(prow)
                for jc, vc in row.items():
                    nv = newr.get(jc, Fraction(0)) - f * vc
                    if nv:
                        newr[jc] = nv
                    else:
                        newr.pop(jc, None)
                reduced[idx] = newr
        pivots.append(col)
        reduced.append(row)
    return pivots, reduced


def _span_dim(vectors):
    pivots, _ = _rref(vectors, None)
    return len(pivots)


def _nullspace(columns, nrows):
    """Nullspace basis of the matrix with the given columns.

    columns: list of dict(row -> coeff).  Returns vectors as dicts
    (column-index -> coeff).
    """
    ncols = len(columns)
    # row-reduce the transpose-augmented system: solve M x = 0
    # build rows indexed by matrix rows
    rows = {}
    for j, col in enumerate(columns):
        for i, c in col.items():
            rows.setdefault(i, {})[j] = c
    pivots, reduced = _rref(list(rows.values()), ncols)
    pivot_set = set(pivots)
    free = [j for j in range(ncols) if j not in pivot_set]
    basis = []
    for f in free:
        vec = {f: Fraction(1)}
        for pc, prow in zip(pivots, reduced):
            if f in prow:
                vec[pc] = -prow[f]
        basis.append(vec)
    return basis


def spectral_pages(complex_, max_page=2):
    """E_0, E_1, ... dimensions by (filtration, degree).

    The filtration is by total internal vertex count, which every piece
    of the differential strictly lowers.
    """
    if complex_.decorated:
        def filt(el):
            return el[0].ki + el[0].kw
    else:
        def filt(el):
            g = el.graph()
            return g.ki + g.kw
    basis_pos = {}
    info = []
    for k, els in sorted(complex_.degrees.items()):
        for i, el in enumerate(els):
            basis_pos[(k, i)] = len(info)
            info.append((k, i, filt(el)))
    # global differential columns: (k, i) -> dict over (k+1, i')
    dcols = {}
    for k in sorted(complex_.degrees):
        m = complex_.matrix(k)
        if m.leaving:
            raise GraphError("image leaves truncation")
        for (i, j), c in m.entries.items():
            dcols.setdefault((k, j), {})[(k + 1, i)] = c

    degrees = sorted(complex_.degrees)
    filts = sorted({f for (_, _, f) in info})
    pages = []
    for page in range(max_page + 1):
        table = {}
        for k in degrees:
            els = complex_.degrees[k]
            for p in filts:
                dim = _page_dim(complex_, dcols, filt, k, p, page)
                if dim:
                    table[(p, k)] = dim
        pages.append(table)
    return pages


def _z_space(complex_, dcols, filt, k, p, r):
    """Basis of Z_r^{p,k} = {x in F_p C^k : d x in F_{p-r}}."""
    els = complex_.degrees.get(k, [])
    idx = [i for i, el in enumerate(els) if filt(el) <= p]
    if not idx:
        return [], []
    # columns of d restricted to these elements, projected away from F_{p-r}
    cols = []
    for i in idx:
        col = dcols.get((k, i), {})
        proj = {}
        for (k1, i1), c in col.items():
            el1 = complex_.degrees[k1][i1]
            if filt(el1) > p - r:
                proj[(k1, i1)] = c
        cols.append(proj)
    null = _nullspace(cols, None)
    vectors = []
    for vec in null:
        vectors.append({idx[j]: c for j, c in vec.items()})
    return vectors, idx


def _apply_d(dcols, k, vec):
    out = {}
    for i, c in vec.items():
        for (k1, i1), c1 in dcols.get((k, i), {}).items():
            key = i1
            out[key] = out.get(key, Fraction(0)) + c * c1
    return {i: c for i, c in out.items() if c}


def _page_dim(complex_, dcols, filt, k, p, r):
    z_r, _ = _z_space(complex_, dcols, filt, k, p, r)
    if not z_r:
        return 0
    denom = []
    z_prev, _ = _z_space(complex_, dcols, filt, k, p - 1, max(r - 1, 0))
    denom.extend(z_prev)
    z_in, _ = _z_space(complex_, dcols, filt, k - 1, p + r - 1, max(r - 1, 0))
    for vec in z_in:
        img = _apply_d(dcols, k - 1, vec)
        if img:
            denom.append(img)
    dim_z = _span_dim(z_r)
    dim_all = _span_dim(z_r + denom)
    dim_denom = _span_dim(denom)
    # dim of (denom ∩ Z_r) subspace actually inside Z_r:
    # |Z_r + denom| = |Z_r| + |denom| - |intersection|
    inter = dim_z + dim_denom - dim_all
    return dim_z - inter
