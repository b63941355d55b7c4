# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled RK4 kernel over CSR adjacency.

Operation-for-operation mirror of _numpy_backend.rk4_csr; see that module
for the contract. Keep the arithmetic ordering in the two files in sync,
and build without fp contraction, or the backends drift apart.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef int GENE = 0

cdef double DERIV_LIMIT = 1e15


cdef inline double _hill(double z) noexcept nogil:
    cdef double z2 = z * z
    return z2 / (1.0 + z2)


cdef void _deriv_gene(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices,
                      double B1, double B2, const double[::1] scale,
                      const double[::1] u, const double[::1] v,
                      double[::1] hu, double[::1] hv,
                      const cnp.uint8_t[::1] clamped,
                      double[::1] du, double[::1] dv) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, jj
    cdef double su, sv
    for i in range(n):
        hu[i] = _hill(u[i])
        hv[i] = _hill(v[i])
    for i in range(n):
        if clamped[i]:
            du[i] = 0.0
            dv[i] = 0.0
            continue
        su = 0.0
        sv = 0.0
        for jj in range(indptr[i], indptr[i + 1]):
            su = su + hu[indices[jj]]
            sv = sv + hv[indices[jj]]
        du[i] = -B1 * u[i] + scale[i] * sv
        dv[i] = -B2 * v[i] + scale[i] * su


cdef void _deriv_mut(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices,
                     double a, double b, double c, double d, double e,
                     double f, const double[::1] scale,
                     const double[::1] u, const double[::1] v,
                     double[::1] u2, double[::1] v2,
                     const cnp.uint8_t[::1] clamped,
                     double[::1] du, double[::1] dv) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, jj
    cdef double su, sv
    for i in range(n):
        u2[i] = u[i] * u[i]
        v2[i] = v[i] * v[i]
    for i in range(n):
        if clamped[i]:
            du[i] = 0.0
            dv[i] = 0.0
            continue
        su = 0.0
        sv = 0.0
        for jj in range(indptr[i], indptr[i + 1]):
            su = su + u2[indices[jj]]
            sv = sv + v2[indices[jj]]
        su = scale[i] * su
        sv = scale[i] * sv
        du[i] = -a * u[i] + b * sv / (1.0 + c * sv)
        dv[i] = -d * v[i] + e * su / (1.0 + f * su)


def rk4_csr(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices, int family,
            const double[::1] pvec, const double[::1] scale,
            double[::1] u, double[::1] v, const cnp.uint8_t[::1] clamped,
            double dt, long n_steps, double conv_tol,
            const cnp.int64_t[::1] record_at,
            double[:, ::1] rec_u, double[:, ::1] rec_v):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t n_rec = record_at.shape[0]
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef double B1 = 0, B2 = 0, a = 0, b = 0, c = 0, d = 0, e = 0, f = 0
    if family == GENE:
        B1 = pvec[0]
        B2 = pvec[1]
    else:
        a = pvec[0]
        b = pvec[1]
        c = pvec[2]
        d = pvec[3]
        e = pvec[4]
        f = pvec[5]

    buf = np.empty((12, n), dtype=np.float64)
    cdef double[:, ::1] w = buf
    cdef double[::1] k1u = w[0], k1v = w[1], k2u = w[2], k2v = w[3]
    cdef double[::1] k3u = w[4], k3v = w[5], k4u = w[6], k4v = w[7]
    cdef double[::1] su = w[8], sv = w[9], ha = w[10], hb = w[11]

    cdef Py_ssize_t rec_idx = 0, i
    cdef long step, completed = 0
    cdef int status = 0
    cdef double dmax, mag

    while rec_idx < n_rec and record_at[rec_idx] == 0:
        rec_u[rec_idx, :] = u
        rec_v[rec_idx, :] = v
        rec_idx += 1

    for step in range(1, n_steps + 1):
        if family == GENE:
            _deriv_gene(indptr, indices, B1, B2, scale, u, v, ha, hb,
                        clamped, k1u, k1v)
        else:
            _deriv_mut(indptr, indices, a, b, c, d, e, f, scale, u, v,
                       ha, hb, clamped, k1u, k1v)
        dmax = 0.0
        for i in range(n):
            mag = k1u[i] if k1u[i] >= 0.0 else -k1u[i]
            if mag > dmax:
                dmax = mag
            mag = k1v[i] if k1v[i] >= 0.0 else -k1v[i]
            if mag > dmax:
                dmax = mag
        if not dmax <= DERIV_LIMIT:
            status = 2
            break
        if dmax < conv_tol:
            status = 1
            break

        for i in range(n):
            su[i] = u[i] + half * k1u[i]
            sv[i] = v[i] + half * k1v[i]
        if family == GENE:
            _deriv_gene(indptr, indices, B1, B2, scale, su, sv, ha, hb,
                        clamped, k2u, k2v)
        else:
            _deriv_mut(indptr, indices, a, b, c, d, e, f, scale, su, sv,
                       ha, hb, clamped, k2u, k2v)
        for i in range(n):
            su[i] = u[i] + half * k2u[i]
            sv[i] = v[i] + half * k2v[i]
        if family == GENE:
            _deriv_gene(indptr, indices, B1, B2, scale, su, sv, ha, hb,
                        clamped, k3u, k3v)
        else:
            _deriv_mut(indptr, indices, a, b, c, d, e, f, scale, su, sv,
                       ha, hb, clamped, k3u, k3v)
        for i in range(n):
            su[i] = u[i] + dt * k3u[i]
            sv[i] = v[i] + dt * k3v[i]
        if family == GENE:
            _deriv_gene(indptr, indices, B1, B2, scale, su, sv, ha, hb,
                        clamped, k4u, k4v)
        else:
            _deriv_mut(indptr, indices, a, b, c, d, e, f, scale, su, sv,
                       ha, hb, clamped, k4u, k4v)

        for i in range(n):
            u[i] = u[i] + sixth * (((k1u[i] + 2.0 * k2u[i]) + 2.0 * k3u[i]) + k4u[i])
            v[i] = v[i] + sixth * (((k1v[i] + 2.0 * k2v[i]) + 2.0 * k3v[i]) + k4v[i])
        completed = step
        while rec_idx < n_rec and record_at[rec_idx] == completed:
            rec_u[rec_idx, :] = u
            rec_v[rec_idx, :] = v
            rec_idx += 1

    while rec_idx < n_rec:
        rec_u[rec_idx, :] = u
        rec_v[rec_idx, :] = v
        rec_idx += 1
    return completed, status
