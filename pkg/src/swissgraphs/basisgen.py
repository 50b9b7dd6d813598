"""Enumeration of canonical basis graphs within truncation bounds."""

from __future__ import annotations

import itertools

from .graphs import (GraphError, canonicalize, is_externally_connected,
                     is_reduced, make_graph)


def _edge_candidates(color, ext1, int1, ext2, int2):
    sources = list(ext1) + list(int1)
    if color == 1:
        cands = []
        for i, a in enumerate(sources):
            for b in sources[i + 1:]:
                cands.append((a, b))
        return cands
    everything = list(ext1) + list(int1) + list(ext2) + list(int2)
    return [(a, b) for a in sources for b in everything if b != a]


def _iter_multisets(cands, n_edges, allow_repeat, min_val, internal, last_idx):
    """Non-decreasing-index edge lists with degree-feasibility pruning."""
    deg = {v: 0 for v in internal}

    def need(v):
        return max(0, min_val - deg[v])

    chosen = []

    def rec(idx, remaining):
        if remaining == 0:
            if all(deg[v] == 0 or deg[v] >= min_val for v in internal):
                yield tuple(chosen)
            return
        # fail fast: frozen internal vertices must already be satisfied
        demand = 0
        for v in internal:
            if deg[v] and deg[v] < min_val:
                if last_idx[v] < idx:
                    return
                demand += min_val - deg[v]
        if demand > 2 * remaining:
            return
        for j in range(idx, len(cands)):
            a, b = cands[j]
            chosen.append(j)
            if a in deg:
                deg[a] += 1
            if b in deg:
                deg[b] += 1
            start = j if allow_repeat else j + 1
            yield from rec(start, remaining - 1)
            chosen.pop()
            if a in deg:
                deg[a] -= 1
            if b in deg:
                deg[b] -= 1

    yield from rec(0, n_edges)


def _first_use_canonical(edges, tokens):
    """Used tokens must be a prefix of their class, in first-use order.

    The bulk (i) and boundary (w) rename classes are independent.
    """
    for kind in ("i", "w"):
        klass = [v for v in tokens if v[0] == kind]
        if not klass:
            continue
        seen = []
        for a, b in edges:
            for v in (a, b):
                if v in klass and v not in seen:
                    seen.append(v)
        if seen != klass[:len(seen)]:
            return False
    return True


def iter_edge_structures(n, color, r, s, ki, kw, n_edges, variant="full",
                         order_free_ii=False):
    """Edge lists (token pairs) for the exact counts, order data aside.

    One representative per cheap normal form; isomorph duplicates may
    remain.  With order_free_ii the internal type II tokens are also
    forced into first-use order (for order-less contexts).
    """
    if color == 1 and (s or kw):
        raise GraphError("color-1 graphs carry no type II vertices")
    ext1 = ["x%d" % i for i in range(1, r + 1)]
    int1 = ["i%d" % i for i in range(1, ki + 1)]
    ext2 = ["b%d" % i for i in range(1, s + 1)]
    int2 = ["w%d" % i for i in range(1, kw + 1)]
    cands = _edge_candidates(color, ext1, int1, ext2, int2)
    if n_edges and not cands:
        return
    allow_repeat = (n - 1) % 2 == 0  # repeated edges die when edges are odd
    if variant == "reduced":
        min_val = 3 if color == 1 else 2
        internal = int1 if color == 1 else int1 + int2
    else:
        min_val = 0
        internal = []
    last_idx = {}
    for v in int1 + int2:
        last_idx[v] = -1
    for j, (a, b) in enumerate(cands):
        for v in (a, b):
            if v in last_idx:
                last_idx[v] = j
    if n == 2 and not order_free_ii:
        fixed_first_use = int1
    else:
        fixed_first_use = int1 + int2
    for idxs in _iter_multisets(cands, n_edges, allow_repeat, min_val,
                                internal, last_idx):
        edges = [cands[j] for j in idxs]
        if not _first_use_canonical(edges, fixed_first_use):
            continue
        if variant == "reduced":
            # isolated internals fail the valence rule outright
            used = {v for e in edges for v in e}
            if any(v not in used for v in int1 + int2):
                continue
        yield edges


def iter_raw_graphs(n, color, r, s, ki, kw, n_edges, variant="full"):
    """All graphs with the exact counts, one per cheap normal form.

    Isomorph duplicates may remain; canonicalize to deduplicate.
    """
    ext2 = ["b%d" % i for i in range(1, s + 1)]
    int2 = ["w%d" % i for i in range(1, kw + 1)]
    for edges in iter_edge_structures(n, color, r, s, ki, kw, n_edges, variant):
        if n == 2:
            for order in itertools.permutations(ext2 + int2):
                try:
                    g = make_graph(n, r, ki, s, kw, edges, order)
                except GraphError:
                    continue
                yield g
        else:
            yield make_graph(n, r, ki, s, kw, edges, None)


def iter_basis_graphs(n, color, r, s, *, max_int1, max_int2, max_total=None,
                      max_edges, variant="full", quotient=False,
                      exact_counts=None):
    """Canonical, deduplicated basis graphs within the bounds."""
    if quotient and n == 2 and color == 2:
        raise GraphError("the n=2 boundary quotient needs the decorated basis")
    seen = set()
    if exact_counts is not None:
        count_list = [exact_counts]
    else:
        count_list = []
        for ki in range(max_int1 + 1):
            for kw in range(max_int2 + 1):
                if color == 1 and kw:
                    continue
                if max_total is not None and ki + kw > max_total:
                    continue
                for ne in range(max_edges + 1):
                    count_list.append((ki, kw, ne))
    for ki, kw, ne in count_list:
        for g in iter_raw_graphs(n, color, r, s, ki, kw, ne, variant):
            if variant == "reduced" and not is_reduced(g, "reduced", color):
                continue
            if quotient and not is_externally_connected(g):
                continue
            canon, sign = canonicalize(g, color)
            if sign == 0 or canon in seen:
                continue
            seen.add(canon)
            yield canon
