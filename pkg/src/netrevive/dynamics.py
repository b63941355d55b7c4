"""Bistable node dynamics and their mean-field analysis.

Two model families, each with a plain and a degree-normalized variant. Every
node carries a state (u, v); neighbors couple the two components crosswise.

gene (regulatory circuit), with hill(z) = z^2 / (1 + z^2):

    du_i/dt = -B1 u_i + s_i * sum_j A_ij hill(v_j)
    dv_i/dt = -B2 v_i + s_i * sum_j A_ij hill(u_j)

mutualism (obligate partners), with saturating gains:

    S_i(x)  = s_i * sum_j A_ij x_j^2
    du_i/dt = -a u_i + b S_i(v) / (1 + c S_i(v))
    dv_i/dt = -d v_i + e S_i(u) / (1 + f S_i(u))

The per-node factor s_i is 1 for the plain variants and k/k_i for the
normalized ones, which pins every node to the mean-degree operating point.
At degree k the two variants coincide, so one mean-field analysis covers
both: all mean-field helpers here take the nominal degree k.

The mean-field equilibria come from the nullcline composition map
phi(u) = U(V(u)); its fixed points are the equilibria, classified stable or
unstable through the 2x2 Jacobian. Both families are bistable in the
regimes of interest: a dead state at the origin and an active high state.
"""
from typing import NamedTuple

import numpy as np

from .errors import DynamicsError, IsolatedNodeError

# a network counts as revived when the mean u level clears this fraction of
# the active state; shared by the full-network judge and the reduced predictor
THETA = 0.5

EQUILIBRIUM_SCAN_POINTS = 10_000
BISECT_TOL = 1e-12


class ModelSpec(NamedTuple):
    name: str
    family: str        # "gene" | "mutualism"
    normalized: bool
    param_names: tuple


MODELS = {
    "gene": ModelSpec("gene", "gene", False, ("B1", "B2")),
    "gene_normalized": ModelSpec("gene_normalized", "gene", True, ("B1", "B2")),
    "mutualism": ModelSpec("mutualism", "mutualism", False,
                           ("a", "b", "c", "d", "e", "f")),
    "mutualism_normalized": ModelSpec("mutualism_normalized", "mutualism", True,
                                      ("a", "b", "c", "d", "e", "f")),
}

DEFAULT_PARAMS = {
    "gene": {"B1": 1.3, "B2": 1.5},
    "mutualism": {"a": 5.0, "b": 4.0, "c": 0.5, "d": 3.0, "e": 3.0, "f": 0.5},
}


def get_model(name):
    try:
        return MODELS[name]
    except KeyError:
        raise DynamicsError(
            f"unknown model {name!r}; choose from {sorted(MODELS)}") from None


def default_params(spec):
    return dict(DEFAULT_PARAMS[spec.family])


def param_vector(spec, params):
    """Validate a parameter dict and order it for the integrator kernels."""
    extra = set(params) - set(spec.param_names)
    if extra:
        raise DynamicsError(f"unknown parameters for {spec.name}: {sorted(extra)}")
    missing = set(spec.param_names) - set(params)
    if missing:
        raise DynamicsError(f"missing parameters for {spec.name}: {sorted(missing)}")
    vec = np.array([float(params[p]) for p in spec.param_names], dtype=np.float64)
    if not np.all(np.isfinite(vec)) or np.any(vec <= 0):
        raise DynamicsError(f"parameters for {spec.name} must be positive finite")
    return vec


def hill(z):
    z2 = z * z
    return z2 / (1.0 + z2)


def hill_prime(z):
    return 2.0 * z / (1.0 + z * z) ** 2


def coupling_scale(spec, g, k):
    """Per-node coupling factor s_i: ones, or k/k_i for normalized models."""
    if not spec.normalized:
        return np.ones(g.n, dtype=np.float64)
    deg = g.degrees()
    if np.any(deg == 0):
        bad = int(np.flatnonzero(deg == 0)[0])
        raise IsolatedNodeError(
            f"node {bad} has no neighbors; {spec.name} divides by degree")
    return float(k) / deg.astype(np.float64)


def node_derivative(spec, params, g, u, v, scale=None):
    """Reference right-hand side on a concrete graph.

    Plain per-node loop, kept easy to audit; the integrator kernels
    reproduce it. Returns (du, dv).
    """
    pv = param_vector(spec, params)
    if scale is None:
        scale = np.ones(g.n, dtype=np.float64)
    du = np.empty(g.n, dtype=np.float64)
    dv = np.empty(g.n, dtype=np.float64)
    if spec.family == "gene":
        B1, B2 = pv
        hu, hv = hill(u), hill(v)
        for i in range(g.n):
            nbr = g.neighbors(i)
            du[i] = -B1 * u[i] + scale[i] * hv[nbr].sum()
            dv[i] = -B2 * v[i] + scale[i] * hu[nbr].sum()
    else:
        a, b, c, d, e, f = pv
        u2, v2 = u * u, v * v
        for i in range(g.n):
            nbr = g.neighbors(i)
            sv = scale[i] * v2[nbr].sum()
            su = scale[i] * u2[nbr].sum()
            du[i] = -a * u[i] + b * sv / (1.0 + c * sv)
            dv[i] = -d * v[i] + e * su / (1.0 + f * su)
    return du, dv


# ---------------------------------------------------------------------------
# mean field: every node at (u, v) with degree k

def mean_field_rhs(spec, params, k, u, v):
    pv = param_vector(spec, params)
    if spec.family == "gene":
        B1, B2 = pv
        return (-B1 * u + k * hill(v), -B2 * v + k * hill(u))
    a, b, c, d, e, f = pv
    sv, su = k * v * v, k * u * u
    return (-a * u + b * sv / (1.0 + c * sv),
            -d * v + e * su / (1.0 + f * su))


def u_nullcline(spec, params, k, v):
    """u that zeroes du/dt at a given v."""
    pv = param_vector(spec, params)
    if spec.family == "gene":
        B1 = pv[0]
        return k * hill(v) / B1
    a, b, c = pv[0], pv[1], pv[2]
    sv = k * v * v
    return b * sv / ((1.0 + c * sv) * a)


def v_nullcline(spec, params, k, u):
    """v that zeroes dv/dt at a given u."""
    pv = param_vector(spec, params)
    if spec.family == "gene":
        B2 = pv[1]
        return k * hill(u) / B2
    a, d, e, f = pv[0], pv[3], pv[4], pv[5]
    su = k * u * u
    return e * su / ((1.0 + f * su) * d)


def scan_bound(spec, params, k):
    """Upper bound on any equilibrium u, from the saturation of the gain."""
    pv = param_vector(spec, params)
    if spec.family == "gene":
        return k / pv[0]
    a, b, c = pv[0], pv[1], pv[2]
    return b / (a * c)


class Equilibrium(NamedTuple):
    u: float
    v: float
    stable: bool


def classify_equilibrium(spec, params, k, u, v):
    """Stability from the 2x2 mean-field Jacobian.

    Both families have strictly negative trace, so the sign of the
    determinant decides: positive means stable, negative a saddle.
    """
    pv = param_vector(spec, params)
    if spec.family == "gene":
        B1, B2 = pv
        det = B1 * B2 - (k * hill_prime(v)) * (k * hill_prime(u))
    else:
        a, b, c, d, e, f = pv
        sv, su = k * v * v, k * u * u
        dudv = b * 2.0 * k * v / (1.0 + c * sv) ** 2
        dvdu = e * 2.0 * k * u / (1.0 + f * su) ** 2
        det = a * d - dudv * dvdu
    return det > 0.0


def mean_field_equilibria(spec, params, k, scan_points=EQUILIBRIUM_SCAN_POINTS):
    """All mean-field equilibria, by scanning phi(u) - u for sign changes
    and bisecting each bracket. The origin is always included."""
    if k <= 0:
        raise DynamicsError("mean field needs k > 0")

    def compose(u):
        return u_nullcline(spec, params, k, v_nullcline(spec, params, k, u))

    bound = scan_bound(spec, params, k) * (1.0 + 1e-9)
    us = np.linspace(0.0, bound, scan_points + 1)
    resid = compose(us) - us
    roots = [0.0]
    for i in range(1, scan_points + 1):
        lo, hi = us[i - 1], us[i]
        rlo, rhi = resid[i - 1], resid[i]
        if rhi == 0.0:
            roots.append(float(hi))
            continue
        if not (rlo > 0.0) ^ (rhi > 0.0) or rlo == 0.0:
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            rm = compose(mid) - mid
            if rm == 0.0:
                lo = hi = mid
                break
            if (rm > 0.0) == (rlo > 0.0):
                lo, rlo = mid, rm
            else:
                hi = mid
            if hi - lo <= BISECT_TOL:
                break
        roots.append(0.5 * (lo + hi))
    out = []
    for u in roots:
        if out and abs(u - out[-1].u) < 1e-9:
            continue
        v = v_nullcline(spec, params, k, u)
        out.append(Equilibrium(u, v, classify_equilibrium(spec, params, k, u, v)))
    return out


def high_state(spec, params, k):
    """The active stable equilibrium (largest u). Raises if the mean field
    is monostable at the origin, since then no clamp can revive anything."""
    eqs = mean_field_equilibria(spec, params, k)
    best = None
    for eq in eqs:
        if eq.stable and eq.u > 1e-8:
            if best is None or eq.u > best.u:
                best = eq
    if best is None:
        raise DynamicsError(
            f"{spec.name} with k={k} has no active stable state; "
            "the dead state is globally attracting")
    return best


def activation_threshold(spec, params, k):
    """Mean-u level that counts as revived: THETA times the active state."""
    return THETA * high_state(spec, params, k).u


def is_activated(mean_u, spec, params, k):
    return bool(mean_u > activation_threshold(spec, params, k))
