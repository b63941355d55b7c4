"""Shell-layer reduction of a random network around a controlled node.

Nodes are grouped by shortest-path distance l to the control set. For a
random graph with mean degree k the layer sizes and the mean connectivity
of a layer-l node into layers l-1, l, l+1 follow a closed recurrence; this
module computes it, measures the same quantities on concrete graphs, and
checks the bookkeeping identities that tie them together.

Notation per layer l:
    d  nodes in the layer
    e  edge stubs arriving from layer l-1 (with multiplicity)
    g  arrival collisions, e - d
    f  nodes strictly farther than l
    c_in / c_within / c_out  mean edges per layer-l node into
        layer l-1 / l / l+1; they sum to k
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import LayerModelError
from .network import UNREACHABLE, bfs_shells

MAX_LAYERS = 10_000


@dataclass(frozen=True)
class LayerParams:
    l: int
    d: float
    e: float
    f: float
    g: float
    c_in: float
    c_within: float
    c_out: float
    terminal: bool


def _first_layer(n, k, d1):
    f = n - d1 - 1.0
    denom = f + d1 - 1.0
    if denom > 0:
        c_within = (k - 1.0) * (d1 - 1.0) / denom
    else:
        c_within = k - 1.0
    c_out = (k - 1.0) - c_within
    terminal = f <= 0.0
    if terminal:
        f = 0.0
        c_within = k - 1.0
        c_out = 0.0
    return LayerParams(1, d1, d1, f, 0.0, 1.0, c_within, c_out, terminal)


def analytic_layers(n, k, seed_layer_size=None):
    """Mean-field layer recurrence for a random graph.

    Layer 1 starts with seed_layer_size nodes (the control node's degree;
    defaults to k), each tied back by exactly one edge. Each later layer
    receives e = c_out * d stubs from its predecessor; collisions remove
    g = e^2 / f of them, and the remainder pool f shrinks accordingly.
    The recurrence stops when it would overdraw the remaining nodes (d <= 0,
    f < 0, or c_out < 0); the terminal layer absorbs everything left.

    Returns layers 1..L; the control node itself is layer 0 and is not
    listed. Node count is conserved exactly: 1 + sum(d_l) == n in floats.
    """
    if n < 3:
        raise LayerModelError("n must be >= 3")
    if not 1.0 < k <= n - 1.0:
        raise LayerModelError("k must satisfy 1 < k <= n-1")
    d1 = float(k if seed_layer_size is None else seed_layer_size)
    if not 1.0 <= d1 <= n - 1.0:
        raise LayerModelError("seed_layer_size must be in [1, n-1]")
    layers = [_first_layer(float(n), float(k), d1)]
    while not layers[-1].terminal:
        prev = layers[-1]
        l = prev.l + 1
        if l > MAX_LAYERS:
            raise LayerModelError(f"no terminal layer within {MAX_LAYERS} layers")
        e = prev.c_out * prev.d
        g = e * e / prev.f
        f = prev.f - (e - g)
        # recover d from the pool difference so the total is conserved
        # exactly; the subtraction is exact whenever f >= prev.f / 2
        d = prev.f - f
        terminal = d <= 0.0 or f < 0.0
        if not terminal:
            c_in = e / d
            denom = f + d - 1.0
            c_within = (k - c_in) * (d - 1.0) / denom if denom != 0 else 0.0
            c_out = k - c_in - c_within
            terminal = c_out < 0.0
        if terminal:
            d = prev.f
            f = 0.0
            g = e - d
            c_in = e / d
            c_within = k - c_in
            c_out = 0.0
        layers.append(LayerParams(l, d, e, f, g, c_in, c_within, c_out, terminal))
    return layers


def empirical_layers(g, sources):
    """Measure the layer quantities on a concrete graph.

    Shells come from multi-source BFS; counts are over the component
    reachable from the sources. The last shell is marked terminal.
    """
    shells = bfs_shells(g, sources)
    layer_of = shells.layer_of.astype(np.int64)
    reachable = int(np.count_nonzero(layer_of != UNREACHABLE))
    # neighbor layers aligned with the CSR index array
    src_layer = np.repeat(layer_of, np.diff(g.indptr))
    dst_layer = layer_of[g.indices]
    out = []
    inside = shells.member_count(0)
    for l in range(1, shells.num_layers + 1):
        members = shells.layer_members[l]
        d = members.shape[0]
        at_l = src_layer == l
        e = int(np.count_nonzero(at_l & (dst_layer == l - 1)))
        within = int(np.count_nonzero(at_l & (dst_layer == l)))
        fwd = int(np.count_nonzero(at_l & (dst_layer == l + 1)))
        inside += d
        f = reachable - inside
        out.append(LayerParams(
            l=l, d=float(d), e=float(e), f=float(f), g=float(e - d),
            c_in=e / d, c_within=within / d, c_out=fwd / d,
            terminal=(l == shells.num_layers)))
    return out


def check_layer_consistency(layers, n, k):
    """Residuals of the bookkeeping identities, scaled by max(1, magnitude).

    Returns a dict with the worst residual per identity:
        node       1 + sum(d) - n  (exact zero for analytic layers)
        flow       e_l - c_out_{l-1} * d_{l-1}
        mass       d - (e - g)
        leftover   f - (f_prev - d)
        collision  g - e^2 / f_prev   (non-terminal layers only)
        degree     c_in + c_within + c_out - k
    """
    if not layers:
        raise LayerModelError("empty layer list")
    res = {key: 0.0 for key in
           ("node", "flow", "mass", "leftover", "collision", "degree")}

    def bump(key, err, scale):
        res[key] = max(res[key], abs(err) / max(1.0, abs(scale)))

    total = math.fsum([1.0] + [lp.d for lp in layers])
    res["node"] = abs(total - n)
    for lp in layers:
        bump("degree", lp.c_in + lp.c_within + lp.c_out - k, k)
    for prev, cur in zip(layers, layers[1:]):
        bump("flow", cur.e - prev.c_out * prev.d, cur.e)
        bump("mass", cur.d - (cur.e - cur.g), cur.d)
        bump("leftover", cur.f - (prev.f - cur.d), prev.f)
        if not cur.terminal:
            bump("collision", cur.g - cur.e * cur.e / prev.f, cur.g)
    return res


def write_layers_csv(layers, path):
    with open(path, "w") as fh:
        fh.write("l,d,e,f,g,c_in,c_within,c_out,terminal\n")
        for lp in layers:
            fh.write(f"{lp.l},{lp.d!r},{lp.e!r},{lp.f!r},{lp.g!r},"
                     f"{lp.c_in!r},{lp.c_within!r},{lp.c_out!r},"
                     f"{int(lp.terminal)}\n")
