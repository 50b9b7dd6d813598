"""Monte-Carlo estimation of n=2 closed-graph weights.

The weight of a closed graph is the integral of the product of its
edge angle forms (each normalized by 2 pi) over the moduli of its
configurations: bulk vertices in the open upper half-plane, boundary
vertices on the real line in the graph's order, modulo scaling and
horizontal translation.

Gauge fixing: the first boundary vertex sits at 0 and the last at 1;
with fewer than two boundary vertices the first bulk vertex is pinned
at height 1 (and at horizontal 0 when there is no boundary vertex at
all).  The chart is oriented by (scaling pin, translation pin) first,
then bulk coordinates (x, h) per vertex in index order, then the free
boundary coordinates in line order; this matches the orientation the
combinatorial differential uses (the conversion weight is -1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .differential import weight_support_ok
from .graphs import GraphError, perm_sign

TWO_PI = 2.0 * np.pi


def angle(p, q):
    """Angle of the hyperbolic geodesic from bulk p toward q, in [0, 2pi).

    Zero when q sits directly above p; the total monodromy of q around
    p is 2 pi.  Vanishes identically as p approaches the real line.
    """
    p = complex(p)
    q = complex(q)
    if p.imag <= 0:
        raise GraphError("source must lie strictly in the upper half-plane")
    if p == q:
        raise GraphError("coincident points")
    val = np.angle((q - p) / (q - np.conjugate(p)))
    return float(val % TWO_PI)


@dataclass
class WeightEstimate:
    estimate: float
    stderr: float
    samples: int
    seed: int
    exact: bool = False
    flag: str = ""

    def as_dict(self):
        return {"estimate": self.estimate, "stderr": self.stderr,
                "samples": self.samples, "seed": self.seed,
                "exact": self.exact, "flag": self.flag}


def _gauge_sign(ki, kw):
    """Orientation sign of the gauge-fixed chart.

    The full coordinate word is (x_1, h_1, ..., x_ki, h_ki, t_1, ...,
    t_kw); the chart moves the scaling pin then the translation pin to
    the front.  The sign is the parity of that rearrangement.
    """
    word = []
    for j in range(ki):
        word.append(("x", j))
        word.append(("h", j))
    for j in range(kw):
        word.append(("t", j))
    if kw >= 2:
        pins = [("t", kw - 1), ("t", 0)]
    elif kw == 1:
        pins = [("h", 0), ("t", 0)]
    else:
        pins = [("h", 0), ("x", 0)]
    rest = [c for c in word if c not in pins]
    target = pins + rest
    pos = {c: i for i, c in enumerate(word)}
    return perm_sign([pos[c] for c in target])


def _arg_grad(zx, zy):
    """d(arg z) coefficients: (d/dx, d/dy) = (-y, x)/|z|^2."""
    n2 = zx * zx + zy * zy
    return -zy / n2, zx / n2


def _phi_gradients(px, ph, qx, qh, want_p, want_q):
    """Gradients of phi(p, q) with respect to the requested coordinates.

    Returns a dict: coordinate tag -> array.  Tags: 'px', 'ph' for the
    source, 'qx', 'qh' for the target (qh only when the target is a
    bulk vertex).
    """
    ux, uy = qx - px, qh - ph
    vx, vy = qx - px, qh + ph
    du_x, du_y = _arg_grad(ux, uy)
    dv_x, dv_y = _arg_grad(vx, vy)
    out = {}
    if want_q:
        out["qx"] = du_x - dv_x
        out["qh"] = du_y - dv_y
    if want_p:
        out["px"] = -du_x + dv_x
        # d u / d ph = -i ; d v / d ph = +i
        out["ph"] = -du_y - dv_y
    return out


def mc_weight(g, samples=100000, seed=7, block_size=1 << 14):
    """Unbiased MC estimate of the closed-graph weight (n=2).

    Deterministic for fixed (seed, samples); the per-block Philox
    streams make the result independent of any outer parallelism.
    """
    if g.n != 2:
        raise GraphError("Monte-Carlo weights are implemented for n=2")
    if not g.is_closed():
        raise GraphError("weight graphs carry no external vertices")
    if not weight_support_ok(g):
        return WeightEstimate(0.0, 0.0, samples, seed, exact=True,
                              flag="support predicate violated")
    ki, kw, ne = g.ki, g.kw, len(g.edges)
    gauge = _gauge_sign(ki, kw)
    # the combinatorial convention treats boundary letters as odd; the
    # chart's commuting t-coordinates differ by the sorting sign of the
    # boundary block
    if (kw * (kw + 1) // 2) % 2:
        gauge = -gauge

    # exact zero-dimensional cases
    if ne == 0:
        return WeightEstimate(float(gauge), 0.0, samples, seed, exact=True)

    order_pos = {v: i for i, v in enumerate(g.order)}
    bulk_index = {v: j for j, v in enumerate(g.int_one())}

    # free coordinate columns, in chart orientation order
    if kw >= 2:
        pinned_bulk = None
        free_boundary = list(range(1, kw - 1))
    elif kw == 1:
        pinned_bulk = 0  # height pinned to 1
        free_boundary = []
    else:
        pinned_bulk = 0  # pinned at (0, 1)
        free_boundary = []
    columns = []
    for j in range(ki):
        if j == pinned_bulk:
            if kw == 0:
                continue  # both coordinates pinned
            columns.append(("px", j))  # height pinned, x free
        else:
            columns.append(("px", j))
            columns.append(("ph", j))
    for t in free_boundary:
        columns.append(("t", t))
    dim = len(columns)
    if dim != ne:
        return WeightEstimate(0.0, 0.0, samples, seed, exact=True,
                              flag="degree mismatch")

    col_pos = {c: i for i, c in enumerate(columns)}

    total = 0.0
    total_sq = 0.0
    done = 0
    n_blocks = (samples + block_size - 1) // block_size
    for b in range(n_blocks):
        take = min(block_size, samples - done)
        rng = np.random.Generator(np.random.Philox(key=seed + (b << 20)))
        # sample bulk coordinates
        px = np.empty((ki, take))
        ph = np.empty((ki, take))
        log_density = np.zeros(take)
        for j in range(ki):
            if j == pinned_bulk:
                ph[j] = 1.0
                if kw == 0:
                    px[j] = 0.0
                else:
                    c = rng.standard_cauchy(take)
                    px[j] = c
                    log_density += -np.log(np.pi * (1.0 + c * c))
            else:
                c = rng.standard_cauchy(take)
                px[j] = c
                log_density += -np.log(np.pi * (1.0 + c * c))
                habs = np.abs(rng.standard_cauchy(take))
                ph[j] = habs
                log_density += np.log(2.0 / (np.pi * (1.0 + habs * habs)))
        # boundary positions, in line order
        tpos = np.empty((kw, take))
        if kw >= 2:
            tpos[0] = 0.0
            tpos[kw - 1] = 1.0
            if kw > 2:
                mids = np.sort(rng.random((kw - 2, take)), axis=0)
                tpos[1:kw - 1] = mids
                import math
                log_density += np.log(float(math.factorial(kw - 2)))
        elif kw == 1:
            tpos[0] = 0.0

        # Jacobian matrix rows: edges in list order
        mat = np.zeros((take, ne, ne))
        ok = np.ones(take, dtype=bool)
        for e_idx, (a, bv) in enumerate(g.edges):
            ja = bulk_index[a]
            pax, pah = px[ja], ph[ja]
            if bv in bulk_index:
                jb = bulk_index[bv]
                qx, qh = px[jb], ph[jb]
                grads = _phi_gradients(pax, pah, qx, qh, True, True)
                targets = [("px", ja, grads["px"]), ("ph", ja, grads["ph"]),
                           ("px", jb, grads["qx"]), ("ph", jb, grads["qh"])]
            else:
                t_i = order_pos[bv] - (0 if bv[0] == "w" else 0)
                t_i = [i for i, v in enumerate(g.order) if v == bv][0]
                qx = tpos[t_i]
                qh = np.zeros(take)
                grads = _phi_gradients(pax, pah, qx, qh, True, True)
                targets = [("px", ja, grads["px"]), ("ph", ja, grads["ph"]),
                           ("t", t_i, grads["qx"])]
            bad = (np.abs(pax - qx) < 1e-12) & (np.abs(pah - qh) < 1e-12)
            ok &= ~bad
            for tag, idx, val in targets:
                key = (tag, idx)
                if key in col_pos:
                    mat[:, e_idx, col_pos[key]] += val
        dets = np.where(ok, np.linalg.det(mat), 0.0)
        vals = gauge * dets / (TWO_PI ** ne) / np.exp(log_density)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        done += take
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    stderr = float(np.sqrt(var / samples))
    return WeightEstimate(mean, stderr, samples, seed)
