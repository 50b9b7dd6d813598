"""Shared machinery for splitting a graph into a kept part and a cluster.

Every cocomposition and every collapse piece of the twist differential
removes an induced cluster of vertices.  The Koszul sign of such a term
is computed here, always with the same target layout

    [keep-E][keep-I][keep-II] [cluster-E][cluster-I][cluster-II]

relative to the instance's own orientation word.  A new boundary vertex
created by a collapse ("the star") enters the layout at the junction
between the two blocks and is moved to its destination slot, crossing
letters at the usual Koszul cost.
"""

from __future__ import annotations

from .graphs import ColoredGraph, koszul_sign, make_graph


def build_graph(n, ext1, int1, ext2, int2, edges, order=None):
    """Assemble a graph from token sequences, renaming consecutively.

    Sequence position becomes the new index, so the letter order of the
    result equals the sequence order and no renaming sign arises.
    """
    mapping = {}
    for j, v in enumerate(ext1):
        mapping[v] = "x%d" % (j + 1)
    for j, v in enumerate(int1):
        mapping[v] = "i%d" % (j + 1)
    for j, v in enumerate(ext2):
        mapping[v] = "b%d" % (j + 1)
    for j, v in enumerate(int2):
        mapping[v] = "w%d" % (j + 1)
    new_edges = [(mapping[a], mapping[b]) for a, b in edges]
    new_order = tuple(mapping[v] for v in order) if order is not None else None
    return make_graph(n, len(ext1), len(int1), len(ext2), len(int2),
                      new_edges, new_order)


def classify_edges(g, cluster, crossing_to_cluster):
    """Partition edge indices into keep / cluster / crossing-in / crossing-out."""
    keep_e, cl_e, cross_in, cross_out = [], [], [], []
    for idx, (a, b) in enumerate(g.edges):
        a_in, b_in = a in cluster, b in cluster
        if a_in and b_in:
            cl_e.append(idx)
        elif not a_in and not b_in:
            keep_e.append(idx)
        elif b_in:
            cross_in.append(idx)
            (cl_e if crossing_to_cluster else keep_e).append(idx)
        else:
            cross_out.append(idx)
            (cl_e if crossing_to_cluster else keep_e).append(idx)
    keep_e.sort()
    cl_e.sort()
    return keep_e, cl_e, cross_in, cross_out


def split_words(g, cluster, crossing_to_cluster, consumed_first=False):
    """Letter partition and the block-layout Koszul sign.

    Returns (keep_e, cl_e, cross_in, cross_out, keep_ii, cl_ii, sign)
    where the edge lists are index lists and the II lists are vertex
    sequences in line order (n=2) or index order (n>=3).  The target
    layout is [keep][cluster], or [cluster][keep] when the cluster is
    consumed at the front (differential pieces).
    """
    keep_e, cl_e, cross_in, cross_out = classify_edges(g, cluster, crossing_to_cluster)
    keep_i = [v for v in g.int_one() if v not in cluster]
    cl_i = [v for v in g.int_one() if v in cluster]
    if g.n == 2:
        seq = g.order
    else:
        seq = g.int_two()
    keep_ii = [v for v in seq if v not in cluster]
    cl_ii = [v for v in seq if v in cluster]
    old = g.orientation_word()
    keep_block = ([("E", i) for i in keep_e] + [("I", v) for v in keep_i]
                  + [("II", v) for v in keep_ii])
    cl_block = ([("E", i) for i in cl_e] + [("I", v) for v in cl_i]
                + [("II", v) for v in cl_ii])
    new = cl_block + keep_block if consumed_first else keep_block + cl_block
    sign = koszul_sign(old, new, g.letter_parity())
    return keep_e, cl_e, cross_in, cross_out, keep_ii, cl_ii, sign


def star_sign_keep(g, keep_ii, slot):
    """Sign for the star entering the keep-II word at `slot`.

    The star is created at the block junction (right end of keep-II)
    and moved left past the keep-II letters after the slot.  Used by
    the cocompositions, whose layout keeps the left factor in front.
    """
    tau = g.type2_parity()
    if not tau:
        return 1
    crossings = len(keep_ii) - slot
    return -1 if crossings % 2 else 1


def star_sign_front(g, n_e, n_i, slot):
    """Sign for a star entering a block from the front of the word.

    The star crosses the block's edge letters and the `slot` type II
    letters before its destination; bulk-vertex letters do not count
    (the star travels inside the boundary zone).  Used by the
    differential pieces, which consume at the front.
    """
    tau = g.type2_parity()
    if not tau:
        return 1
    crossings = g.edge_parity() * n_e + tau * slot
    return -1 if crossings % 2 else 1


def contiguous_run(seq, members):
    """Slot of a contiguous run of `members` inside `seq`, else None.

    Returns the number of non-members before the run.  An empty member
    set is reported as None (no determined slot).
    """
    members = set(members)
    if not members:
        return None
    positions = [i for i, v in enumerate(seq) if v in members]
    if positions[-1] - positions[0] + 1 != len(positions):
        return None
    return positions[0]
