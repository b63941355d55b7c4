"""Reduced shell-chain model: predict revival without simulating the network.

The layer decomposition collapses the graph to L+1 coupled super-nodes: the
controlled node (layer 0) and one node per shell, wired by the per-layer
mean connectivities c_in / c_within / c_out. Clamping layer 0 and
integrating this chain costs microseconds per step regardless of network
size, so activation boundaries in the (u_s, v_s) plane come from bisection
over many reduced runs instead of Monte Carlo over full networks.

Batched integration keeps that cheap: a whole grid of clamp values runs as
one (batch, L+1) array through the same RK4 scheme as the full simulator.
"""
from dataclasses import dataclass

import numpy as np

from .dynamics import activation_threshold, hill, param_vector
from .errors import (ConfigError, DynamicsError, LayerModelError,
                     NumericalBlowupError)
from .layer_model import analytic_layers
from .simulate import MAX_DT, Trajectory

REDUCED_CONV_TOL = 1e-12
DERIV_LIMIT = 1e15


@dataclass
class ReducedSystem:
    """The chain plus everything the integrator needs precomputed.

    weights are the layer node counts d_1..d_L; activation is judged on the
    d-weighted layer mean, the control node excluded. threshold is +inf when
    the model has no active state, so nothing ever counts as revived. c0 is
    the control node's total coupling into layer 1 once released (k for
    normalized variants, d_1 for plain ones).
    """
    spec: object
    params: dict
    n: float
    k: float
    layers: list
    c_in: np.ndarray
    c_within: np.ndarray
    c_out: np.ndarray
    c0: float
    weights: np.ndarray
    threshold: float

    @property
    def num_layers(self):
        return len(self.layers)


def build_reduced(spec, params, n, k, seed_layer_size=None, layers=None):
    """Assemble the chain from analytic layers, or from supplied ones
    (typically measured on a concrete graph)."""
    param_vector(spec, params)
    if layers is None:
        layers = analytic_layers(n, k, seed_layer_size=seed_layer_size)
    if not layers:
        raise LayerModelError("no layers")
    c_in = np.array([lp.c_in for lp in layers])
    c_within = np.array([lp.c_within for lp in layers])
    c_out = np.array([lp.c_out for lp in layers])
    d = np.array([lp.d for lp in layers])
    stacked = np.concatenate([c_in, c_within, c_out, d])
    if not np.all(np.isfinite(stacked)):
        raise LayerModelError("layer parameters must be finite")
    if np.any(d <= 0) or np.any(c_in <= 0):
        raise LayerModelError("layer sizes and inward connectivity must be positive")
    if np.any(c_within < 0) or np.any(c_out < 0):
        raise LayerModelError("negative connectivity; the mean-field layer "
                              "model does not describe this graph")
    try:
        threshold = activation_threshold(spec, params, k)
    except DynamicsError:
        threshold = np.inf
    return ReducedSystem(
        spec=spec, params=dict(params), n=float(n), k=float(k), layers=layers,
        c_in=c_in, c_within=c_within, c_out=c_out,
        c0=float(k) if spec.normalized else float(d[0]),
        weights=d.copy(), threshold=threshold)


def _deriv_batch(rsys, U, V, clamp0, dU, dV):
    """RHS for a (batch, L+1) state block, written into dU/dV.

    Column 0 is the controlled node: all its k edges reach layer 1. Columns
    1..L couple to their chain neighbors; the terminal c_out is exactly zero
    so the missing L+1 column contributes nothing. Every chain row has total
    connectivity k, so the plain and degree-normalized couplings coincide
    here and no per-node scale appears.
    """
    spec = rsys.spec
    pvec = rsys._pvec
    L = rsys.num_layers
    ci, cw, co = rsys.c_in, rsys.c_within, rsys.c_out
    c0 = rsys.c0
    if spec.family == "gene":
        B1, B2 = pvec
        HU, HV = hill(U), hill(V)
        cu = ci * HV[:, 0:L] + cw * HV[:, 1:L + 1]
        cv = ci * HU[:, 0:L] + cw * HU[:, 1:L + 1]
        if L > 1:
            cu[:, :L - 1] += co[:L - 1] * HV[:, 2:L + 1]
            cv[:, :L - 1] += co[:L - 1] * HU[:, 2:L + 1]
        dU[:, 1:] = -B1 * U[:, 1:] + cu
        dV[:, 1:] = -B2 * V[:, 1:] + cv
        dU[:, 0] = -B1 * U[:, 0] + c0 * HV[:, 1]
        dV[:, 0] = -B2 * V[:, 0] + c0 * HU[:, 1]
    else:
        a, b, c, d, e, f = pvec
        U2, V2 = U * U, V * V
        sv = ci * V2[:, 0:L] + cw * V2[:, 1:L + 1]
        su = ci * U2[:, 0:L] + cw * U2[:, 1:L + 1]
        if L > 1:
            sv[:, :L - 1] += co[:L - 1] * V2[:, 2:L + 1]
            su[:, :L - 1] += co[:L - 1] * U2[:, 2:L + 1]
        dU[:, 1:] = -a * U[:, 1:] + b * sv / (1.0 + c * sv)
        dV[:, 1:] = -d * V[:, 1:] + e * su / (1.0 + f * su)
        sv0, su0 = c0 * V2[:, 1], c0 * U2[:, 1]
        dU[:, 0] = -a * U[:, 0] + b * sv0 / (1.0 + c * sv0)
        dV[:, 0] = -d * V[:, 0] + e * su0 / (1.0 + f * su0)
    if clamp0:
        dU[:, 0] = 0.0
        dV[:, 0] = 0.0


def _rk4_batch(rsys, U, V, clamp0, dt, n_steps, conv_tol):
    """Fixed-step RK4 on the chain, in place. Stops early once every system
    in the batch has a derivative below conv_tol. Returns (steps, status)
    with the same status codes as the full-network kernel."""
    shape = U.shape
    k1u, k1v = np.empty(shape), np.empty(shape)
    k2u, k2v = np.empty(shape), np.empty(shape)
    k3u, k3v = np.empty(shape), np.empty(shape)
    k4u, k4v = np.empty(shape), np.empty(shape)
    half, sixth = 0.5 * dt, dt / 6.0
    completed, status = 0, 0
    for step in range(1, n_steps + 1):
        _deriv_batch(rsys, U, V, clamp0, k1u, k1v)
        dmax = max(np.max(np.abs(k1u)), np.max(np.abs(k1v)))
        if not dmax <= DERIV_LIMIT:
            return completed, 2
        if dmax < conv_tol:
            return completed, 1
        _deriv_batch(rsys, U + half * k1u, V + half * k1v, clamp0, k2u, k2v)
        _deriv_batch(rsys, U + half * k2u, V + half * k2v, clamp0, k3u, k3v)
        _deriv_batch(rsys, U + dt * k3u, V + dt * k3v, clamp0, k4u, k4v)
        U += sixth * (((k1u + 2.0 * k2u) + 2.0 * k3u) + k4u)
        V += sixth * (((k1v + 2.0 * k2v) + 2.0 * k3v) + k4v)
        completed = step
    return completed, status


@dataclass
class ReducedResult:
    u: np.ndarray
    v: np.ndarray
    mean_u: float
    mean_v: float
    threshold: float
    activated: bool
    steps_done: int
    converged: bool
    trajectory: Trajectory = None


def _weighted_mean(rsys, X):
    # layer mean with node-count weights; the control node is not a layer
    return (X[..., 1:] @ rsys.weights) / rsys.weights.sum()


def _prepare(rsys):
    rsys._pvec = param_vector(rsys.spec, rsys.params)


def _steps_for(t, dt):
    return int(round(t / dt))


def integrate_reduced(rsys, control, dt=0.01, conv_tol=REDUCED_CONV_TOL,
                      record_times=None):
    """Clamp-and-release on the reduced chain, mirroring integrate_full:
    layer 0 held at (u_s, v_s) for control_time, then released.

    Layer 0 stands for whatever the chain was built around: one node by
    default, or a clamped set when the layers came from seed_layer_size or
    an empirical multi-source decomposition. control.num_clamped is not
    consulted here.
    """
    control.validate()
    if dt <= 0 or dt > MAX_DT:
        raise ConfigError(f"dt must be in (0, {MAX_DT}]; got {dt}")
    _prepare(rsys)
    M = rsys.num_layers + 1
    U = np.zeros((1, M))
    V = np.zeros((1, M))
    U[0, 0], V[0, 0] = control.u_s, control.v_s

    steps1 = _steps_for(control.control_time, dt)
    steps2 = _steps_for(control.post_release_time, dt)
    total = steps1 + steps2
    if record_times is not None:
        rec_steps = np.clip(np.rint(np.asarray(record_times, float) / dt),
                            0, total).astype(np.int64)
        if np.any(np.diff(rec_steps) < 0):
            raise ConfigError("record_times must be non-decreasing")
    else:
        rec_steps = np.empty(0, dtype=np.int64)

    # walk record marks in order, integrating the gaps between them; once a
    # phase converges the state is frozen and remaining marks copy it
    snaps_u, snaps_v = [], []
    rec_list = rec_steps.tolist()
    ri = 0
    while ri < len(rec_list) and rec_list[ri] == 0:
        snaps_u.append(U[0].copy())
        snaps_v.append(V[0].copy())
        ri += 1
    steps_done = 0
    converged = False
    global_step = 0
    for phase_steps, clamp0 in ((steps1, True), (steps2, False)):
        if phase_steps == 0:
            continue
        frozen = False
        target = global_step + phase_steps
        while global_step < target:
            next_mark = rec_list[ri] if ri < len(rec_list) else target
            next_mark = min(max(next_mark, global_step + 1), target)
            if not frozen:
                seg = next_mark - global_step
                done, status = _rk4_batch(rsys, U, V, clamp0, dt, seg,
                                          conv_tol)
                steps_done += done
                if status == 2:
                    t_bad = (global_step + done) * dt
                    raise NumericalBlowupError(
                        f"reduced state blew up at t~{t_bad:.3f}", t=t_bad)
                if status == 1:
                    frozen = True
            global_step = next_mark
            while ri < len(rec_list) and rec_list[ri] == global_step:
                snaps_u.append(U[0].copy())
                snaps_v.append(V[0].copy())
                ri += 1
        converged = frozen

    while ri < len(rec_list):
        snaps_u.append(U[0].copy())
        snaps_v.append(V[0].copy())
        ri += 1

    trajectory = None
    if rec_steps.shape[0]:
        layer_u = np.stack(snaps_u)
        layer_v = np.stack(snaps_v)
        trajectory = Trajectory(
            times=rec_steps * dt, layer_u=layer_u, layer_v=layer_v,
            mean_u=np.array([_weighted_mean(rsys, row) for row in layer_u]),
            mean_v=np.array([_weighted_mean(rsys, row) for row in layer_v]))

    mean_u = float(_weighted_mean(rsys, U[0]))
    return ReducedResult(
        u=U[0], v=V[0], mean_u=mean_u,
        mean_v=float(_weighted_mean(rsys, V[0])),
        threshold=rsys.threshold,
        activated=bool(mean_u > rsys.threshold),
        steps_done=steps_done, converged=converged, trajectory=trajectory)


def predict_activation(rsys, control, dt=0.01):
    """Does the reduced chain say this clamp revives the network?"""
    return integrate_reduced(rsys, control, dt=dt).activated


def predict_activation_grid(rsys, u_values, v_values, control_template,
                            dt=0.01):
    """Activation verdicts for a whole clamp grid in one batched run.
    Returns a boolean array of shape (len(u_values), len(v_values))."""
    control_template.validate()
    if dt <= 0 or dt > MAX_DT:
        raise ConfigError(f"dt must be in (0, {MAX_DT}]; got {dt}")
    _prepare(rsys)
    u_values = np.asarray(u_values, dtype=np.float64)
    v_values = np.asarray(v_values, dtype=np.float64)
    UU, VV = np.meshgrid(u_values, v_values, indexing="ij")
    B = UU.size
    M = rsys.num_layers + 1
    U = np.zeros((B, M))
    V = np.zeros((B, M))
    U[:, 0] = UU.ravel()
    V[:, 0] = VV.ravel()
    steps1 = _steps_for(control_template.control_time, dt)
    steps2 = _steps_for(control_template.post_release_time, dt)
    _run_two_phase(rsys, U, V, dt, steps1, steps2)
    return (_weighted_mean(rsys, U) > rsys.threshold).reshape(
        u_values.size, v_values.size)


def _run_two_phase(rsys, U, V, dt, steps1, steps2):
    done, status = _rk4_batch(rsys, U, V, True, dt, steps1, REDUCED_CONV_TOL)
    if status == 2:
        raise NumericalBlowupError("reduced state blew up during control",
                                   t=done * dt)
    if steps2 > 0:
        done2, status2 = _rk4_batch(rsys, U, V, False, dt, steps2,
                                    REDUCED_CONV_TOL)
        if status2 == 2:
            raise NumericalBlowupError("reduced state blew up after release",
                                       t=(steps1 + done2) * dt)


# ---------------------------------------------------------------------------
# activation boundary in the clamp plane

@dataclass
class BoundaryCurve:
    """Activation boundary sampled along rays from the origin.

    flags per ray: "ok" (single crossing, bisected), "degenerate" (already
    active at the first sample), "multi" (several crossings; radius is the
    innermost, intervals lists every bracket), "no_activation" (dead out to
    r_max; radius is NaN).
    """
    angles: np.ndarray
    radii: np.ndarray
    u: np.ndarray
    v: np.ndarray
    flags: list
    intervals: list

    def usable(self):
        return np.isfinite(self.radii)


def find_boundary(rsys, control_template, u_max, v_max, n_rays=16,
                  coarse_points=32, radial_tol=1e-3, dt=0.01):
    """Radial bisection of the predicted activation boundary.

    Rays use strictly interior angles so both clamp components stay
    positive. A coarse scan brackets the dead-to-active flip on each ray;
    a batched bisection then narrows every bracket to radial_tol.
    """
    control_template.validate()
    if u_max <= 0 or v_max <= 0 or n_rays < 2 or coarse_points < 2:
        raise ConfigError("boundary search needs positive extents, "
                          "n_rays >= 2 and coarse_points >= 2")
    if radial_tol <= 0:
        raise ConfigError("radial_tol must be positive")
    if dt <= 0 or dt > MAX_DT:
        raise ConfigError(f"dt must be in (0, {MAX_DT}]; got {dt}")
    _prepare(rsys)
    idx = np.arange(n_rays)
    angles = (idx + 1) * (np.pi / 2) / (n_rays + 1)
    cos, sin = np.cos(angles), np.sin(angles)
    r_max = np.minimum(u_max / cos, v_max / sin)

    steps1 = _steps_for(control_template.control_time, dt)
    steps2 = _steps_for(control_template.post_release_time, dt)
    M = rsys.num_layers + 1

    def active_at(radii_flat, ray_idx):
        B = radii_flat.size
        U = np.zeros((B, M))
        V = np.zeros((B, M))
        U[:, 0] = radii_flat * cos[ray_idx]
        V[:, 0] = radii_flat * sin[ray_idx]
        _run_two_phase(rsys, U, V, dt, steps1, steps2)
        return _weighted_mean(rsys, U) > rsys.threshold

    # coarse scan, all rays at once
    frac = np.arange(1, coarse_points + 1) / coarse_points
    rr = r_max[:, None] * frac[None, :]
    ray_idx = np.repeat(idx, coarse_points)
    acts = active_at(rr.ravel(), ray_idx).reshape(n_rays, coarse_points)

    radii = np.full(n_rays, np.nan)
    flags = []
    intervals = [None] * n_rays
    lo = np.zeros(n_rays)
    hi = np.zeros(n_rays)
    needs_bisect = np.zeros(n_rays, dtype=bool)
    for i in range(n_rays):
        row = acts[i]
        if not row.any():
            flags.append("no_activation")
            continue
        flips = np.flatnonzero(row[1:] != row[:-1])
        if row[0]:
            flags.append("degenerate")
            radii[i] = rr[i, 0]
            continue
        first = flips[0]
        lo[i], hi[i] = rr[i, first], rr[i, first + 1]
        needs_bisect[i] = True
        if flips.size > 1:
            flags.append("multi")
            intervals[i] = [(float(rr[i, j]), float(rr[i, j + 1]))
                            for j in flips]
        else:
            flags.append("ok")

    while True:
        open_rays = np.flatnonzero(needs_bisect & (hi - lo > radial_tol))
        if open_rays.size == 0:
            break
        mid = 0.5 * (lo[open_rays] + hi[open_rays])
        act = active_at(mid, open_rays)
        hi[open_rays[act]] = mid[act]
        lo[open_rays[~act]] = mid[~act]
    sel = needs_bisect
    radii[sel] = 0.5 * (lo[sel] + hi[sel])
    return BoundaryCurve(angles=angles, radii=radii,
                         u=radii * cos, v=radii * sin,
                         flags=flags, intervals=intervals)


def write_boundary_csv(curve, path):
    """Rays that never activate are left out; the rest carry their flag's
    best radius estimate."""
    with open(path, "w") as fh:
        fh.write("angle,radius,u_s,v_s\n")
        for i in range(curve.angles.size):
            if not np.isfinite(curve.radii[i]):
                continue
            fh.write(f"{float(curve.angles[i])!r},{float(curve.radii[i])!r},"
                     f"{float(curve.u[i])!r},{float(curve.v[i])!r}\n")
