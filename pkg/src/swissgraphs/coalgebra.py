"""Hopf product and the three colored cocompositions."""

from __future__ import annotations

import itertools

from .graphs import GraphError, koszul_sign
from .splits import (build_graph, split_words, star_sign_keep, contiguous_run)
from .vectors import ArityError, GraphVector, TensorVector


# ---------------------------------------------------------------------------
# Hopf product


def unit_vector(n, color, r, s, order=None):
    """Multiplicative unit: the edgeless graph without internal vertices."""
    if n == 2 and color == 2 and order is None:
        order = tuple("b%d" % i for i in range(1, s + 1))
    g = build_graph(n, ["x%d" % i for i in range(1, r + 1)], [],
                    ["b%d" % i for i in range(1, s + 1)], [], [],
                    order if n == 2 else None)
    v = GraphVector(n, color, r, s)
    v.add_term(g, 1)
    return v


def _segments(order, anchors):
    """Split an order word at the anchor letters; len(anchors)+1 segments."""
    segs = [[]]
    for v in order:
        if v in anchors:
            segs.append([])
        else:
            segs[-1].append(v)
    return segs


def _interleavings(xs, ys):
    """All merges of two sequences keeping each sequence's internal order."""
    if not xs:
        yield list(ys)
        return
    if not ys:
        yield list(xs)
        return
    for rest in _interleavings(xs[1:], ys):
        yield [xs[0]] + rest
    for rest in _interleavings(xs, ys[1:]):
        yield [ys[0]] + rest


def _merged_orders(ox, oy_internal_segs, anchors):
    """Merge x's order with y's internal letters, segment by segment."""
    segs_x = _segments(ox, anchors)
    anchor_seq = [v for v in ox if v in anchors]
    per_seg = [list(_interleavings(sx, sy))
               for sx, sy in zip(segs_x, oy_internal_segs)]
    for choice in itertools.product(*per_seg):
        merged = list(choice[0])
        for anchor, seg in zip(anchor_seq, choice[1:]):
            merged.append(anchor)
            merged.extend(seg)
        yield tuple(merged)


def _product_pair(gx, gy, color, out):
    """Accumulate the product of two single graphs into `out` (coeff 1)."""
    n = gx.n
    shift_i = {v: "i%d" % (gx.ki + j + 1) for j, v in enumerate(gy.int_one())}
    shift_w = {v: "w%d" % (gx.kw + j + 1) for j, v in enumerate(gy.int_two())}
    ren = lambda v: shift_i.get(v, shift_w.get(v, v))
    y_edges = [(ren(a), ren(b)) for a, b in gy.edges]
    edges = list(gx.edges) + y_edges
    int1 = list(gx.int_one()) + ["i%d" % (gx.ki + j + 1) for j in range(gy.ki)]
    int2 = list(gx.int_two()) + ["w%d" % (gx.kw + j + 1) for j in range(gy.kw)]
    # block-merge sign: only y-edges crossing x's type II letters can count
    if n == 2:
        n_iix = len(gx.order)
    else:
        n_iix = gx.kw
    sign = -1 if ((n - 1) % 2) * len(y_edges) * n_iix % 2 else 1

    if n >= 3 or color == 1:
        g = build_graph(n, gx.ext_one(), int1, gx.ext_two(), int2, edges, None)
        out.add_term(g, sign)
        return

    # n = 2, color 2: orders must agree on the shared external letters
    ext = set(gx.ext_two())
    if tuple(v for v in gx.order if v in ext) != tuple(v for v in gy.order if v in ext):
        return
    oy = tuple(ren(v) for v in gy.order)
    y_segs = _segments(oy, ext)
    old_word = list(gx.order) + [v for v in oy if v not in ext]
    for merged in _merged_orders(gx.order, y_segs, ext):
        s2 = koszul_sign(old_word, list(merged), lambda v: 1)
        g = build_graph(2, gx.ext_one(), int1, gx.ext_two(), int2, edges, merged)
        out.add_term(g, sign * s2)


def hopf_product(x, y):
    """Graded-commutative product: glue at the external vertices."""
    if (x.n, x.color, x.r, x.s) != (y.n, y.color, y.r, y.s):
        raise ArityError("arity mismatch")
    out = GraphVector(x.n, x.color, x.r, x.s)
    for kx, cx in x.terms.items():
        gx = kx.graph()
        for ky, cy in y.terms.items():
            tmp = GraphVector(x.n, x.color, x.r, x.s)
            _product_pair(gx, ky.graph(), x.color, tmp)
            for k, c in tmp.terms.items():
                out.add_term(k, c * cx * cy)
    return out


# ---------------------------------------------------------------------------
# cocompositions


def _star_ext1_sequence(g, collapsed_labels):
    """External type I tokens of the left factor; star sits at min(S)."""
    star_key = min(collapsed_labels)
    seq = [("x%d" % i, i) for i in range(1, g.r + 1) if i not in collapsed_labels]
    seq.append(("*", star_key))
    seq.sort(key=lambda t: t[1])
    return [tok for tok, _ in seq]


def cocompose_color1(x, subset):
    """Sum over internal distributions of the subgraph collapse at `subset`."""
    if x.color != 1:
        raise GraphError("cocompose_color1 needs a color-1 vector")
    subset = frozenset(subset)
    if not subset or not subset <= set(range(1, x.r + 1)):
        raise GraphError("S empty or out of range")
    out = TensorVector()
    for key, coeff in x.terms.items():
        g = key.graph()
        s_tokens = {"x%d" % i for i in subset}
        internals = g.int_one()
        for bits in itertools.product((False, True), repeat=len(internals)):
            a_set = {v for v, b in zip(internals, bits) if b}
            cluster = s_tokens | a_set
            keep_e, cl_e, cross_in, cross_out, _, _, sign = \
                split_words(g, cluster, crossing_to_cluster=False)
            left_ext = _star_ext1_sequence(g, subset)
            red = lambda v: "*" if v in cluster else v
            left_edges = [(red(g.edges[i][0]), red(g.edges[i][1])) for i in keep_e]
            keep_i = [v for v in internals if v not in cluster]
            left = build_graph(g.n, left_ext, keep_i, [], [], left_edges,
                               () if g.n == 2 else None)
            right_ext = ["x%d" % i for i in sorted(subset)]
            right_int = [v for v in internals if v in a_set]
            right_edges = [g.edges[i] for i in cl_e]
            right = build_graph(g.n, right_ext, right_int, [], [], right_edges,
                                () if g.n == 2 else None)
            from .graphs import canonicalize
            ck_l, s_l = canonicalize(left, 1)
            if s_l == 0:
                continue
            ck_r, s_r = canonicalize(right, 1)
            if s_r == 0:
                continue
            out.add_term(ck_l, ck_r, coeff * sign * s_l * s_r)
    return out


def cocompose_upper(x, subset):
    """Collapse bulk external slots (plus bulk internals) to a bulk slot."""
    if x.color != 2:
        raise GraphError("cocompose_upper needs a color-2 vector")
    subset = frozenset(subset)
    if not subset:
        raise GraphError("S_I empty")
    if not subset <= set(range(1, x.r + 1)):
        raise GraphError("collapsed set touches type II vertices")
    out = TensorVector()
    from .graphs import canonicalize
    for key, coeff in x.terms.items():
        g = key.graph()
        s_tokens = {"x%d" % i for i in subset}
        internals = g.int_one()
        for bits in itertools.product((False, True), repeat=len(internals)):
            a_set = {v for v, b in zip(internals, bits) if b}
            cluster = s_tokens | a_set
            keep_e, cl_e, cross_in, cross_out, keep_ii, _, sign = \
                split_words(g, cluster, crossing_to_cluster=False)
            left_ext = _star_ext1_sequence(g, subset)
            red = lambda v: "*" if v in cluster else v
            left_edges = [(red(g.edges[i][0]), red(g.edges[i][1])) for i in keep_e]
            keep_i = [v for v in internals if v not in cluster]
            left = build_graph(g.n, left_ext, keep_i, g.ext_two(), g.int_two(),
                               left_edges, g.order)
            right = build_graph(g.n, ["x%d" % i for i in sorted(subset)],
                                [v for v in internals if v in a_set], [], [],
                                [g.edges[i] for i in cl_e],
                                () if g.n == 2 else None)
            ck_l, s_l = canonicalize(left, 2)
            if s_l == 0:
                continue
            ck_r, s_r = canonicalize(right, 1)
            if s_r == 0:
                continue
            out.add_term(ck_l, ck_r, coeff * sign * s_l * s_r)
    return out


def _ext2_star_sequence(g, collapsed_labels):
    """External type II tokens of the left factor, star keyed at min(S_II)."""
    star_key = min(collapsed_labels) if collapsed_labels else g.s + 1
    seq = [("b%d" % i, i) for i in range(1, g.s + 1) if i not in collapsed_labels]
    seq.append(("*", star_key))
    seq.sort(key=lambda t: t[1])
    return [tok for tok, _ in seq]


def cocompose_boundary(x, subset_one, subset_two):
    """Collapse boundary-touching slots to a boundary slot."""
    if x.color != 2:
        raise GraphError("cocompose_boundary needs a color-2 vector")
    s1 = frozenset(subset_one)
    s2 = frozenset(subset_two)
    if not s1 and not s2:
        raise GraphError("S_I \\u222a S_II empty")
    if not s1 <= set(range(1, x.r + 1)) or not s2 <= set(range(1, x.s + 1)):
        raise GraphError("subset out of range")
    out = TensorVector()
    from .graphs import canonicalize
    for key, coeff in x.terms.items():
        g = key.graph()
        s1_tokens = {"x%d" % i for i in s1}
        s2_tokens = {"b%d" % i for i in s2}
        if g.n == 2 and s2_tokens:
            restricted = [v for v in g.order if v in set(g.ext_two())]
            if contiguous_run(restricted, s2_tokens) is None:
                raise GraphError("non-interval S_II (n=2)")
        internals = g.int_one() + g.int_two()
        for bits in itertools.product((False, True), repeat=len(internals)):
            a_set = {v for v, b in zip(internals, bits) if b}
            cluster = s1_tokens | s2_tokens | a_set
            keep_e, cl_e, cross_in, cross_out, keep_ii, cl_ii, sign = \
                split_words(g, cluster, crossing_to_cluster=False)
            if cross_out:
                continue
            red = lambda v: "*" if v in cluster else v
            left_edges = [(red(g.edges[i][0]), red(g.edges[i][1])) for i in keep_e]
            keep_i = [v for v in g.int_one() if v not in cluster]
            keep_w = [v for v in g.int_two() if v not in cluster]
            left_ext2 = _ext2_star_sequence(g, s2)
            right_ext1 = ["x%d" % i for i in sorted(s1)]
            right_ext2 = ["b%d" % i for i in sorted(s2)]
            right_int1 = [v for v in g.int_one() if v in a_set]
            right_int2 = [v for v in g.int_two() if v in a_set]
            right_edges = [g.edges[i] for i in cl_e]
            left_ext1 = ["x%d" % i for i in range(1, g.r + 1) if i not in s1]
            if g.n == 2:
                cl_members = s2_tokens | {v for v in a_set if v[0] == "w"}
                right_order = tuple(v for v in g.order if v in cl_members)
                if cl_members:
                    slot = contiguous_run(g.order, cl_members)
                    if slot is None:
                        continue
                    slots = [slot]
                else:
                    slots = range(len(keep_ii) + 1)
                for slot in slots:
                    left_order = tuple(keep_ii[:slot]) + ("*",) + tuple(keep_ii[slot:])
                    s_star = star_sign_keep(g, keep_ii, slot)
                    left = build_graph(2, left_ext1, keep_i, left_ext2, keep_w,
                                       left_edges, left_order)
                    right = build_graph(2, right_ext1, right_int1, right_ext2,
                                        right_int2, right_edges, right_order)
                    ck_l, s_l = canonicalize(left, 2)
                    if s_l == 0:
                        continue
                    ck_r, s_r = canonicalize(right, 2)
                    if s_r == 0:
                        continue
                    out.add_term(ck_l, ck_r, coeff * sign * s_star * s_l * s_r)
            else:
                left = build_graph(g.n, left_ext1, keep_i, left_ext2, keep_w,
                                   left_edges, None)
                right = build_graph(g.n, right_ext1, right_int1, right_ext2,
                                    right_int2, right_edges, None)
                ck_l, s_l = canonicalize(left, 2)
                if s_l == 0:
                    continue
                ck_r, s_r = canonicalize(right, 2)
                if s_r == 0:
                    continue
                out.add_term(ck_l, ck_r, coeff * sign * s_l * s_r)
    return out
