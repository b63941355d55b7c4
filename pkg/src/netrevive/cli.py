"""Command-line pipeline: gen, layers, predict, simulate, sweep, compare.

One JSON config drives every subcommand so predictions, simulations and
comparisons are guaranteed to share their settings. Tabular results land as
CSV files in the output directory; each command also leaves a JSON sidecar
with its summary numbers.

Exit codes: 0 success, 2 bad config or model/layer rejection, 3 numerical
blow-up, 4 I/O failure.
"""
import argparse
import dataclasses
import json
import os
import sys
import time

import numpy as np

from .config import load_config
from .dynamics import activation_threshold
from .errors import NetreviveError, NumericalBlowupError
from .layer_model import (analytic_layers, check_layer_consistency,
                          empirical_layers, write_layers_csv)
from .network import (NetworkRecipe, degree_stats, is_connected,
                      load_edge_list, save_edge_list)
from .reduced import (build_reduced, find_boundary, integrate_reduced,
                      predict_activation_grid, write_boundary_csv)
from .simulate import (ControlSpec, choose_clamped_nodes, integrate_full,
                       sweep_grid, write_activity_scatter_csv,
                       write_sweep_csv, write_trajectory_csv)

EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_IO = 4


def _recipe(cfg):
    net = cfg.network
    if net.type == "er":
        return NetworkRecipe(kind="er", n=net.n, k=net.k)
    if net.type == "ba":
        return NetworkRecipe(kind="ba", n=net.n, m=net.m)
    g, report = load_edge_list(net.path)
    recipe = NetworkRecipe(kind="fixed", graph=g)
    return recipe


def _control_spec(cfg):
    c = cfg.control
    return ControlSpec(u_s=c.u_s, v_s=c.v_s, control_time=c.t,
                       post_release_time=c.post_release_time,
                       num_clamped=c.num_clamped)


def _clamped_set(cfg, g):
    """The node set the control grabs: explicit ids, or a random seed node
    grown to num_clamped neighbors, derived from the network seed."""
    c = cfg.control
    if isinstance(c.nodes, tuple):
        nodes = np.array(sorted(c.nodes), dtype=np.int64)
        if nodes[-1] >= g.n:
            raise NetreviveError(
                f"control.nodes references node {int(nodes[-1])} "
                f"but the graph has {g.n} nodes")
        return nodes
    rng = np.random.default_rng(np.random.SeedSequence((cfg.network.seed, 1)))
    seed_node = int(rng.integers(g.n))
    return choose_clamped_nodes(g, seed_node, c.num_clamped)


def _reduced_system(cfg, recipe):
    """The chain cmd_predict and cmd_compare share.

    Generated ensembles with a single controlled node use the analytic
    layers. A fixed graph, or any multi-node control, is decomposed
    empirically around the actual clamped set instead.
    """
    spec = cfg.model.spec
    params = cfg.model.params
    if recipe.kind != "fixed" and cfg.control.num_clamped == 1 \
            and not isinstance(cfg.control.nodes, tuple):
        return build_reduced(spec, params, recipe.nominal_n,
                             recipe.nominal_k)
    g = recipe.build(cfg.network.seed)
    clamped = _clamped_set(cfg, g)
    layers = empirical_layers(g, clamped)
    return build_reduced(spec, params, g.n, recipe.nominal_k, layers=layers)


def _out_path(cfg, name):
    os.makedirs(cfg.output_dir, exist_ok=True)
    return os.path.join(cfg.output_dir, name)


def _json_safe(value):
    # strict JSON has no Infinity/NaN tokens; sidecars use null instead
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def _write_json(cfg, name, payload):
    with open(_out_path(cfg, name), "w") as fh:
        json.dump(_json_safe(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen(cfg):
    if cfg.network.type == "file":
        raise NetreviveError("gen needs a generated network type (er or ba)")
    recipe = _recipe(cfg)
    g = recipe.build(cfg.network.seed)
    save_edge_list(g, _out_path(cfg, "graph.edges"))
    stats = degree_stats(g)
    _write_json(cfg, "graph.json", {
        "n": g.n, "edges": g.num_edges, "k_avg": g.k_avg,
        "connected": bool(is_connected(g)),
        "degrees": stats.to_dict(),
        "type": cfg.network.type, "seed": cfg.network.seed})
    print(f"wrote graph.edges: {g.n} nodes, {g.num_edges} edges, "
          f"k_avg {g.k_avg:.3f}")
    return 0


def cmd_layers(cfg):
    recipe = _recipe(cfg)
    n, k = recipe.nominal_n, recipe.nominal_k
    layers = analytic_layers(n, k)
    write_layers_csv(layers, _out_path(cfg, "layers.csv"))
    residuals = check_layer_consistency(layers, n, k)
    payload = {"n": n, "k": k, "num_layers": len(layers),
               "residuals": residuals,
               "consistent": bool(max(residuals.values()) < 1e-9)}

    if cfg.network.type == "file":
        g = recipe.graph
        clamped = _clamped_set(cfg, g)
        emp = empirical_layers(g, clamped)
        write_layers_csv(emp, _out_path(cfg, "layers_empirical.csv"))
        _write_layer_comparison(layers, emp,
                                _out_path(cfg, "layers_compare.csv"))
        payload["empirical_layers"] = len(emp)
        payload["clamped_nodes"] = [int(i) for i in clamped]
    _write_json(cfg, "layers.json", payload)
    print(f"wrote layers.csv: {len(layers)} layers for n={n}, k={k:g}; "
          f"worst residual {max(residuals.values()):.3g}")
    return 0


def _write_layer_comparison(analytic, empirical, path):
    """Analytic and measured layer quantities side by side with relative
    errors, over the layers both decompositions have."""
    fields = ("d", "c_in", "c_within", "c_out")
    with open(path, "w") as fh:
        header = ["l"]
        for q in fields:
            header += [f"{q}_analytic", f"{q}_empirical", f"{q}_rel_err"]
        fh.write(",".join(header) + "\n")
        for la, le in zip(analytic, empirical):
            row = [str(la.l)]
            for q in fields:
                a, e = getattr(la, q), getattr(le, q)
                rel = abs(a - e) / max(abs(a), 1e-12)
                row += [repr(float(a)), repr(float(e)), repr(float(rel))]
            fh.write(",".join(row) + "\n")


def cmd_predict(cfg):
    recipe = _recipe(cfg)
    rsys = _reduced_system(cfg, recipe)
    control = _control_spec(cfg)
    dt = cfg.numerics.dt

    u_max = float(cfg.sweep.u.values().max())
    v_max = float(cfg.sweep.v.values().max())
    curve = find_boundary(rsys, control, u_max, v_max,
                          n_rays=cfg.boundary.n_rays,
                          radial_tol=cfg.boundary.radial_tol, dt=dt)
    write_boundary_csv(curve, _out_path(cfg, "boundary.csv"))

    total = control.control_time + control.post_release_time
    marks = cfg.numerics.record_times(total)
    res = integrate_reduced(rsys, control, dt=dt, record_times=marks)
    if res.trajectory is not None:
        write_trajectory_csv(res.trajectory,
                             _out_path(cfg, "trajectory_reduced.csv"))

    flags = {f: curve.flags.count(f) for f in sorted(set(curve.flags))}
    _write_json(cfg, "predict.json", {
        "activated": res.activated, "mean_u": res.mean_u,
        "mean_v": res.mean_v, "threshold": res.threshold,
        "num_layers": rsys.num_layers, "converged": res.converged,
        "boundary_flags": flags,
        "boundary_points": int(curve.usable().sum())})
    print(f"clamp ({control.u_s:g}, {control.v_s:g}) -> "
          f"{'activates' if res.activated else 'stays dead'} "
          f"(mean u {res.mean_u:.4f} vs threshold {res.threshold:.4f}); "
          f"boundary: {int(curve.usable().sum())}/{cfg.boundary.n_rays} rays")
    return 0


def cmd_simulate(cfg):
    recipe = _recipe(cfg)
    g = recipe.build(cfg.network.seed)
    control = _control_spec(cfg)
    clamped = _clamped_set(cfg, g)
    total = control.control_time + control.post_release_time
    marks = cfg.numerics.record_times(total)
    res = integrate_full(g, cfg.model.spec, cfg.model.params, control,
                         dt=cfg.numerics.dt, record_times=marks,
                         nominal_k=recipe.nominal_k, clamped_nodes=clamped)
    write_activity_scatter_csv(g, res, _out_path(cfg, "scatter.csv"))
    if res.trajectory is not None:
        write_trajectory_csv(res.trajectory, _out_path(cfg, "trajectory.csv"))
    _write_json(cfg, "simulate.json", {
        "activated": res.activated, "mean_u": res.mean_u,
        "mean_v": res.mean_v, "threshold": res.threshold,
        "converged": res.converged, "steps_done": res.steps_done,
        "t_end": res.t_end,
        "clamped_nodes": [int(i) for i in res.clamped_nodes],
        "n": g.n, "k_avg": g.k_avg})
    print(f"simulated {g.n} nodes: mean u {res.mean_u:.4f} vs threshold "
          f"{res.threshold:.4f} -> "
          f"{'activated' if res.activated else 'dead'}")
    return 0


def cmd_sweep(cfg):
    recipe = _recipe(cfg)
    control = _control_spec(cfg)
    us = cfg.sweep.u.values()
    vs = cfg.sweep.v.values()
    total = us.size * vs.size * cfg.sweep.reps
    stride = max(1, total // 20)

    def progress(done, out_of):
        if done % stride == 0 or done == out_of:
            print(f"run {done}/{out_of}", flush=True)

    t0 = time.perf_counter()
    sweep = sweep_grid(recipe, cfg.model.spec, cfg.model.params, control,
                       us, vs, cfg.sweep.reps, cfg.sweep.master_seed,
                       dt=cfg.numerics.dt, workers=cfg.sweep.workers,
                       progress=progress)
    wall = time.perf_counter() - t0
    write_sweep_csv(sweep, _out_path(cfg, "sweep.csv"))
    _write_json(cfg, "sweep.json", {
        "reps": sweep.reps, "master_seed": sweep.master_seed,
        "model": sweep.spec_name, "workers": cfg.sweep.workers,
        "cells": int(us.size * vs.size), "runs": total,
        "failures": int(sweep.failures.sum()),
        "wall_seconds": wall})
    print(f"wrote sweep.csv: {us.size}x{vs.size} cells x {sweep.reps} reps "
          f"in {wall:.1f}s ({cfg.sweep.workers} workers)")
    return 0


def _read_sweep_csv(path):
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "u_s,v_s,fraction,failures":
            raise NetreviveError(f"unexpected sweep CSV header: {header!r}")
        rows = [line.split(",") for line in fh.read().split()]
    cells = {(float(r[0]), float(r[1])): float(r[2]) for r in rows}
    us = np.array(sorted({uv[0] for uv in cells}))
    vs = np.array(sorted({uv[1] for uv in cells}))
    if len(cells) != us.size * vs.size:
        raise NetreviveError("sweep CSV does not cover a full grid")
    fraction = np.array([[cells[(u, v)] for v in vs] for u in us])
    return us, vs, fraction


def _read_boundary_csv(path):
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "angle,radius,u_s,v_s":
            raise NetreviveError(f"unexpected boundary CSV header: {header!r}")
        pts = [tuple(float(x) for x in line.split(","))
               for line in fh.read().split()]
    pts.sort()
    return np.array([[p[2], p[3]] for p in pts]).reshape(-1, 2)


def _distance_to_polyline(points, poly):
    """Euclidean point-to-segment distances; inf if the polyline is empty."""
    if poly.shape[0] == 0:
        return np.full(points.shape[0], np.inf)
    if poly.shape[0] == 1:
        return np.hypot(*(points - poly[0]).T)
    best = np.full(points.shape[0], np.inf)
    for a, b in zip(poly[:-1], poly[1:]):
        ab = b - a
        denom = float(ab @ ab)
        t = np.clip(((points - a) @ ab) / denom, 0.0, 1.0) if denom > 0 \
            else np.zeros(points.shape[0])
        closest = a + t[:, None] * ab
        best = np.minimum(best, np.hypot(*(points - closest).T))
    return best


def cmd_compare(cfg):
    sweep_path = _out_path(cfg, "sweep.csv")
    boundary_path = _out_path(cfg, "boundary.csv")
    for p in (sweep_path, boundary_path):
        if not os.path.exists(p):
            raise FileNotFoundError(f"compare needs {p}; run sweep and "
                                    "predict first")
    us, vs, fraction = _read_sweep_csv(sweep_path)
    poly = _read_boundary_csv(boundary_path)

    recipe = _recipe(cfg)
    rsys = _reduced_system(cfg, recipe)
    predicted = predict_activation_grid(rsys, us, vs, _control_spec(cfg),
                                        dt=cfg.numerics.dt)

    # distances in cell units: a cell closer than one grid step to the
    # boundary is too ambiguous to score
    du = np.diff(us).mean() if us.size > 1 else 1.0
    dv = np.diff(vs).mean() if vs.size > 1 else 1.0
    UU, VV = np.meshgrid(us, vs, indexing="ij")
    pts = np.column_stack([UU.ravel() / du, VV.ravel() / dv])
    scaled_poly = poly / [du, dv] if poly.size else poly
    dist = _distance_to_polyline(pts, scaled_poly).reshape(us.size, vs.size)
    far = dist > 1.0

    majority = fraction >= 0.5
    agree = majority == predicted
    n_far = int(far.sum())
    agreement = float(agree[far].mean()) if n_far else float("nan")

    with open(_out_path(cfg, "compare.csv"), "w") as fh:
        fh.write("u_s,v_s,fraction,majority,predicted,distance_cells,far,"
                 "agree\n")
        for i, u in enumerate(us):
            for j, v in enumerate(vs):
                fh.write(f"{float(u)!r},{float(v)!r},"
                         f"{float(fraction[i, j])!r},"
                         f"{int(majority[i, j])},{int(predicted[i, j])},"
                         f"{float(dist[i, j])!r},{int(far[i, j])},"
                         f"{int(agree[i, j])}\n")
    _write_json(cfg, "compare.json", {
        "agreement": agreement, "far_cells": n_far,
        "near_cells": int((~far).sum()),
        "total_cells": int(far.size),
        "matching_far_cells": int(agree[far].sum()) if n_far else 0})
    pct = f"{100 * agreement:.1f}%" if n_far else "n/a (no far cells)"
    print(f"agreement over far cells: {pct} "
          f"({int(agree[far].sum()) if n_far else 0}/{n_far})")
    return 0


# ---------------------------------------------------------------------------
# argument plumbing

COMMANDS = {
    "gen": cmd_gen,
    "layers": cmd_layers,
    "predict": cmd_predict,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="netrevive",
        description="Predict and verify single-node revival of networked "
                    "bistable systems.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", required=True, help="JSON run config")
        p.add_argument("--out", help="override output_dir")
        p.add_argument("--threads", type=int,
                       help="override sweep.workers")
        p.add_argument("--seed", type=int,
                       help="override network.seed and sweep.master_seed")
    return parser


def _apply_overrides(cfg, args):
    if args.out is not None:
        cfg = dataclasses.replace(cfg, output_dir=args.out)
    if args.seed is not None:
        cfg = dataclasses.replace(
            cfg,
            network=dataclasses.replace(cfg.network, seed=args.seed),
            sweep=dataclasses.replace(cfg.sweep, master_seed=args.seed))
    if args.threads is not None:
        if args.threads < 1:
            raise NetreviveError("--threads must be >= 1")
        cfg = dataclasses.replace(
            cfg, sweep=dataclasses.replace(cfg.sweep, workers=args.threads))
    return cfg


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = _apply_overrides(cfg, args)
        return COMMANDS[args.command](cfg)
    except NumericalBlowupError as exc:
        print(f"numerical blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except NetreviveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
