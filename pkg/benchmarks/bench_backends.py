"""Times the compiled RK4 kernel against the numpy fallback on the same
workload and confirms the two produce bit-identical states.

Run from the repository root:

    python3 benchmarks/bench_backends.py [--n 2000] [--steps 2000]
"""
import argparse
import importlib
import time

import numpy as np

from netrevive.dynamics import (coupling_scale, default_params, get_model,
                                param_vector)
from netrevive._kernels import _numpy_backend, family_id
from netrevive.network import generate_er


def load_compiled():
    try:
        return importlib.import_module("netrevive._kernels._rk4c")
    except ImportError:
        return None


def run_once(kernel, g, spec, dt, n_steps):
    pvec = param_vector(spec, default_params(spec))
    scale = coupling_scale(spec, g, g.k_avg)
    u = np.zeros(g.n)
    v = np.zeros(g.n)
    clamped = np.zeros(g.n, dtype=np.uint8)
    clamped[0] = 1
    u[0] = 2.0
    v[0] = 2.0
    empty = np.empty(0, dtype=np.int64)
    rec = np.empty((0, g.n))
    t0 = time.perf_counter()
    steps, status = kernel.rk4_csr(g.indptr, g.indices, family_id(spec),
                                   pvec, scale, u, v, clamped, dt,
                                   n_steps, 0.0, empty, rec, rec.copy())
    wall = time.perf_counter() - t0
    assert steps == n_steps and status == 0, (steps, status)
    return wall, u, v


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000, help="network size")
    ap.add_argument("--k", type=float, default=10.0, help="average degree")
    ap.add_argument("--steps", type=int, default=2000, help="RK4 steps")
    ap.add_argument("--dt", type=float, default=0.01)
    args = ap.parse_args()

    compiled = load_compiled()
    g = generate_er(args.n, args.k, seed=1)
    print(f"ER network: n={g.n}, edges={g.num_edges}, "
          f"steps={args.steps}, dt={args.dt}")

    for name in ["gene_normalized", "mutualism_normalized"]:
        spec = get_model(name)
        wall_np, u_np, v_np = run_once(_numpy_backend, g, spec,
                                       args.dt, args.steps)
        line = f"{name:22s} numpy {wall_np:7.3f}s"
        if compiled is not None:
            wall_c, u_c, v_c = run_once(compiled, g, spec,
                                        args.dt, args.steps)
            same = (u_np.tobytes() == u_c.tobytes()
                    and v_np.tobytes() == v_c.tobytes())
            line += (f"   c {wall_c:7.3f}s   speedup {wall_np / wall_c:5.1f}x"
                     f"   bit-identical: {same}")
            if not same:
                raise SystemExit("backend results diverged")
        else:
            line += "   (compiled kernel not built)"
        print(line)


if __name__ == "__main__":
    main()
