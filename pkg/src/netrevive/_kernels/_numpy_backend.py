"""Vectorized integrator used when the compiled kernel is unavailable.

Mirrors _rk4c operation for operation: same stage arithmetic, same
summation order inside the sparse matvec (scipy iterates each CSR row
sequentially, and the all-ones data array makes every product exact), same
convergence and blow-up checks. The two backends agree to the last few ulps,
and each is bit-deterministic on its own.
"""
import numpy as np
from scipy.sparse import csr_matrix

GENE, MUTUALISM = 0, 1

DERIV_LIMIT = 1e15


def _hill(z):
    z2 = z * z
    return z2 / (1.0 + z2)


def rk4_csr(indptr, indices, family, pvec, scale, u, v, clamped,
            dt, n_steps, conv_tol, record_at, rec_u, rec_v):
    """Classical fixed-step RK4 on CSR adjacency, states updated in place.

    Clamped nodes have their derivative zeroed at every stage, which holds
    them exactly at their current value. Returns (steps_done, status) with
    status 0 = ran out of steps, 1 = derivative norm fell below conv_tol,
    2 = non-finite or exploding derivative. On early exit the remaining
    record slots are filled with the (frozen) final state.
    """
    n = u.shape[0]
    ones = np.ones(indices.shape[0], dtype=np.float64)
    A = csr_matrix((ones, indices, indptr), shape=(n, n))
    clamp_idx = np.flatnonzero(clamped)

    if family == GENE:
        B1, B2 = pvec[0], pvec[1]

        def deriv(uu, vv):
            du = -B1 * uu + scale * (A @ _hill(vv))
            dv = -B2 * vv + scale * (A @ _hill(uu))
            du[clamp_idx] = 0.0
            dv[clamp_idx] = 0.0
            return du, dv
    else:
        a, b, c, d, e, f = (float(x) for x in pvec)

        def deriv(uu, vv):
            sv = scale * (A @ (vv * vv))
            su = scale * (A @ (uu * uu))
            du = -a * uu + b * sv / (1.0 + c * sv)
            dv = -d * vv + e * su / (1.0 + f * su)
            du[clamp_idx] = 0.0
            dv[clamp_idx] = 0.0
            return du, dv

    half, sixth = 0.5 * dt, dt / 6.0
    n_rec = record_at.shape[0]
    rec_idx = 0
    while rec_idx < n_rec and record_at[rec_idx] == 0:
        rec_u[rec_idx] = u
        rec_v[rec_idx] = v
        rec_idx += 1

    status = 0
    completed = 0
    for step in range(1, n_steps + 1):
        k1u, k1v = deriv(u, v)
        dmax = max(np.max(np.abs(k1u)), np.max(np.abs(k1v))) if n else 0.0
        if not dmax <= DERIV_LIMIT:  # catches NaN too
            status = 2
            break
        if dmax < conv_tol:
            status = 1
            break
        k2u, k2v = deriv(u + half * k1u, v + half * k1v)
        k3u, k3v = deriv(u + half * k2u, v + half * k2v)
        k4u, k4v = deriv(u + dt * k3u, v + dt * k3v)
        u += sixth * (((k1u + 2.0 * k2u) + 2.0 * k3u) + k4u)
        v += sixth * (((k1v + 2.0 * k2v) + 2.0 * k3v) + k4v)
        completed = step
        while rec_idx < n_rec and record_at[rec_idx] == completed:
            rec_u[rec_idx] = u
            rec_v[rec_idx] = v
            rec_idx += 1

    while rec_idx < n_rec:
        rec_u[rec_idx] = u
        rec_v[rec_idx] = v
        rec_idx += 1
    return completed, status
