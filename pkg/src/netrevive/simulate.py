"""Full-network clamp-and-release experiments.

A run takes a graph, clamps a small node set at (u_s, v_s) for a control
window, optionally lets the network run free afterwards, and judges revival
by the mean u level over all nodes against the mean-field threshold. The
Monte Carlo sweep repeats this over a grid of clamp values with fresh
random graphs and fresh random target nodes per repetition, seeded so the
whole sweep is reproducible bit for bit regardless of worker count.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernels import family_id, rk4_csr
from .dynamics import activation_threshold, coupling_scale, param_vector
from .errors import ConfigError, NumericalBlowupError
from .network import bfs_shells

MAX_DT = 0.05
FULL_CONV_TOL = 1e-9


@dataclass(frozen=True)
class ControlSpec:
    """Clamp prescription: hold num_clamped nodes at (u_s, v_s) for
    control_time, then release for post_release_time."""
    u_s: float
    v_s: float
    control_time: float = 60.0
    post_release_time: float = 0.0
    num_clamped: int = 1

    def validate(self):
        if self.u_s < 0 or self.v_s < 0:
            raise ConfigError("clamp values must be non-negative")
        if self.control_time < 0 or self.post_release_time < 0:
            raise ConfigError("control and release times must be non-negative")
        if self.num_clamped < 1:
            raise ConfigError("num_clamped must be >= 1")


@dataclass
class Trajectory:
    """Shell-averaged time series: column l of layer_u is the mean u over
    the nodes at distance l from the clamped set (layer 0 = the set)."""
    times: np.ndarray
    layer_u: np.ndarray
    layer_v: np.ndarray
    mean_u: np.ndarray
    mean_v: np.ndarray


@dataclass
class SimResult:
    u: np.ndarray
    v: np.ndarray
    mean_u: float
    mean_v: float
    threshold: float
    activated: bool
    clamped_nodes: np.ndarray
    steps_done: int
    converged: bool
    t_end: float
    trajectory: Trajectory = None


def choose_clamped_nodes(g, seed_node, count):
    """The seed node plus its nearest neighbors: breadth-first order,
    ties broken by node id, so the set is adjacent and deterministic."""
    if count == 1:
        return np.array([seed_node], dtype=np.int64)
    shells = bfs_shells(g, [seed_node])
    order = np.lexsort((np.arange(g.n), shells.layer_of))
    reachable = int(np.count_nonzero(shells.layer_of >= 0))
    if count > reachable:
        raise ConfigError(
            f"cannot clamp {count} nodes; only {reachable} reachable")
    return np.sort(order[:count]).astype(np.int64)


def shell_average(x, shells):
    """Mean of x per shell, layers 0..num_layers."""
    return np.array([x[members].mean() for members in shells.layer_members])


def judge_activation(u, spec, params, k):
    """Revival verdict for a full-network state: mean u against the
    mean-field threshold shared with the reduced predictor."""
    return bool(np.mean(u) > activation_threshold(spec, params, k))


def _steps_for(t, dt):
    return int(round(t / dt))


def integrate_full(g, spec, params, control, u0=None, v0=None, dt=0.01,
                   conv_tol=FULL_CONV_TOL, record_times=None, nominal_k=None,
                   clamped_nodes=None, seed_node=0):
    """Clamp-and-release integration of the full network.

    The clamped set (explicit, or grown around seed_node) is snapped to
    (u_s, v_s) and held there through every RK4 stage for control_time,
    then released for post_release_time. States start at the dead state
    unless u0/v0 are given. record_times, if set, yields a shell-averaged
    Trajectory around the clamped set.

    Raises NumericalBlowupError if the state leaves the finite range, and
    ConfigError for steps too coarse to trust (dt > 0.05).
    """
    control.validate()
    if dt <= 0 or dt > MAX_DT:
        raise ConfigError(f"dt must be in (0, {MAX_DT}]; got {dt}")
    if nominal_k is None:
        nominal_k = g.k_avg
    pvec = param_vector(spec, params)
    scale = coupling_scale(spec, g, nominal_k)
    fam = family_id(spec)

    u = np.zeros(g.n) if u0 is None else np.array(u0, dtype=np.float64)
    v = np.zeros(g.n) if v0 is None else np.array(v0, dtype=np.float64)
    if u.shape != (g.n,) or v.shape != (g.n,):
        raise ConfigError("initial state shape does not match the graph")

    if clamped_nodes is None:
        clamped_nodes = choose_clamped_nodes(g, seed_node, control.num_clamped)
    else:
        clamped_nodes = np.asarray(clamped_nodes, dtype=np.int64)
    mask = np.zeros(g.n, dtype=np.uint8)
    mask[clamped_nodes] = 1
    u[clamped_nodes] = control.u_s
    v[clamped_nodes] = control.v_s

    steps1 = _steps_for(control.control_time, dt)
    steps2 = _steps_for(control.post_release_time, dt)
    total_steps = steps1 + steps2

    if record_times is not None:
        record_times = np.asarray(record_times, dtype=np.float64)
        rec_steps = np.clip(np.rint(record_times / dt), 0, total_steps
                            ).astype(np.int64)
        if np.any(np.diff(rec_steps) < 0):
            raise ConfigError("record_times must be non-decreasing")
    else:
        rec_steps = np.empty(0, dtype=np.int64)
    rec_u = np.empty((rec_steps.shape[0], g.n))
    rec_v = np.empty((rec_steps.shape[0], g.n))

    in_phase1 = rec_steps <= steps1
    done1, status1 = rk4_csr(
        g.indptr, g.indices, fam, pvec, scale, u, v, mask, dt, steps1,
        conv_tol, rec_steps[in_phase1], rec_u[:int(in_phase1.sum())],
        rec_v[:int(in_phase1.sum())])
    if status1 == 2:
        raise NumericalBlowupError(
            f"state blew up during control at t~{done1 * dt:.3f}", t=done1 * dt)

    done2, status2 = 0, 0
    if steps2 > 0:
        free = np.zeros(g.n, dtype=np.uint8)
        n1 = int(in_phase1.sum())
        done2, status2 = rk4_csr(
            g.indptr, g.indices, fam, pvec, scale, u, v, free, dt, steps2,
            conv_tol, rec_steps[~in_phase1] - steps1, rec_u[n1:], rec_v[n1:])
        if status2 == 2:
            t_bad = (steps1 + done2) * dt
            raise NumericalBlowupError(
                f"state blew up after release at t~{t_bad:.3f}", t=t_bad)

    trajectory = None
    if rec_steps.shape[0]:
        shells = bfs_shells(g, clamped_nodes)
        layer_u = np.stack([shell_average(row, shells) for row in rec_u])
        layer_v = np.stack([shell_average(row, shells) for row in rec_v])
        trajectory = Trajectory(times=rec_steps * dt, layer_u=layer_u,
                                layer_v=layer_v, mean_u=rec_u.mean(axis=1),
                                mean_v=rec_v.mean(axis=1))

    mean_u = float(np.mean(u))
    threshold = activation_threshold(spec, params, nominal_k)
    converged = (status1 == 1 and steps2 == 0) or status2 == 1
    return SimResult(
        u=u, v=v, mean_u=mean_u, mean_v=float(np.mean(v)),
        threshold=threshold, activated=bool(mean_u > threshold),
        clamped_nodes=clamped_nodes, steps_done=done1 + done2,
        converged=converged,
        t_end=control.control_time + control.post_release_time,
        trajectory=trajectory)


# ---------------------------------------------------------------------------
# Monte Carlo sweep over clamp values

@dataclass
class SweepResult:
    u_values: np.ndarray
    v_values: np.ndarray
    fraction: np.ndarray      # activated fraction, shape (len(u), len(v))
    failures: np.ndarray      # runs lost to blow-up etc., same shape
    reps: int
    master_seed: int
    spec_name: str


def run_seeds(master_seed, i, j, rep):
    """The two sub-seeds (graph, node pick) for one run. Derived from the
    cell position, not the execution order, so any scheduling of the runs
    reproduces the same sweep."""
    ss = np.random.SeedSequence((master_seed, i, j, rep))
    graph_seed, node_seed = (int(x) for x in ss.generate_state(2, np.uint64))
    return graph_seed, node_seed


def _one_run(args):
    (recipe, spec, params, control, dt, master_seed, i, j, rep) = args
    graph_seed, node_seed = run_seeds(master_seed, i, j, rep)
    try:
        g = recipe.build(graph_seed)
        node = int(np.random.default_rng(node_seed).integers(0, g.n))
        res = integrate_full(g, spec, params, control, dt=dt,
                             nominal_k=recipe.nominal_k, seed_node=node)
        return (i, j, rep), res.activated, False
    except NumericalBlowupError:
        return (i, j, rep), False, True


def sweep_grid(recipe, spec, params, control_template, u_values, v_values,
               reps, master_seed, dt=0.01, workers=1, progress=None):
    """Activation fraction over a grid of clamp values.

    Each (u_s, v_s, rep) run draws a fresh graph from the recipe and a
    fresh uniformly random target node, both derived from
    (master_seed, i, j, rep). fraction[i, j] is the share of reps whose
    final state cleared the threshold; blown-up runs count in failures and
    as non-activated.
    """
    u_values = np.asarray(u_values, dtype=np.float64)
    v_values = np.asarray(v_values, dtype=np.float64)
    if reps < 1:
        raise ConfigError("reps must be >= 1")
    tasks = []
    for i, u_s in enumerate(u_values):
        for j, v_s in enumerate(v_values):
            control = ControlSpec(
                u_s=float(u_s), v_s=float(v_s),
                control_time=control_template.control_time,
                post_release_time=control_template.post_release_time,
                num_clamped=control_template.num_clamped)
            for rep in range(reps):
                tasks.append((recipe, spec, params, control, dt,
                              master_seed, i, j, rep))

    outcomes = {}
    if workers <= 1:
        for t, task in enumerate(tasks):
            key, activated, failed = _one_run(task)
            outcomes[key] = (activated, failed)
            if progress:
                progress(t + 1, len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for t, (key, activated, failed) in enumerate(
                    pool.map(_one_run, tasks, chunksize=4)):
                outcomes[key] = (activated, failed)
                if progress:
                    progress(t + 1, len(tasks))

    fraction = np.zeros((u_values.size, v_values.size))
    failures = np.zeros((u_values.size, v_values.size), dtype=np.int64)
    for i in range(u_values.size):
        for j in range(v_values.size):
            hits = sum(outcomes[(i, j, rep)][0] for rep in range(reps))
            fails = sum(outcomes[(i, j, rep)][1] for rep in range(reps))
            fraction[i, j] = hits / reps
            failures[i, j] = fails
    return SweepResult(u_values=u_values, v_values=v_values,
                       fraction=fraction, failures=failures, reps=reps,
                       master_seed=master_seed, spec_name=spec.name)


# ---------------------------------------------------------------------------
# CSV writers

def write_sweep_csv(sweep, path):
    with open(path, "w") as fh:
        fh.write("u_s,v_s,fraction,failures\n")
        for i, u_s in enumerate(sweep.u_values):
            for j, v_s in enumerate(sweep.v_values):
                fh.write(f"{float(u_s)!r},{float(v_s)!r},"
                         f"{float(sweep.fraction[i, j])!r},"
                         f"{int(sweep.failures[i, j])}\n")


def write_trajectory_csv(traj, path):
    with open(path, "w") as fh:
        fh.write("t,layer,u,v\n")
        for ti, t in enumerate(traj.times):
            for l in range(traj.layer_u.shape[1]):
                fh.write(f"{float(t)!r},{l},{float(traj.layer_u[ti, l])!r},"
                         f"{float(traj.layer_v[ti, l])!r}\n")


def write_activity_scatter_csv(g, result, path):
    """Final per-node state next to degree and shell index, for checking
    how activity organizes by connectivity."""
    shells = bfs_shells(g, result.clamped_nodes)
    deg = g.degrees()
    with open(path, "w") as fh:
        fh.write("node,degree,layer,u,v\n")
        for node in range(g.n):
            fh.write(f"{node},{int(deg[node])},{int(shells.layer_of[node])},"
                     f"{float(result.u[node])!r},{float(result.v[node])!r}\n")
