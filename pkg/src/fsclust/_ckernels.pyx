# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: pairwise Gaussian-derivative sums and KDE grid sums.

Same contract as ``fsclust._pykernels``. Sums are accumulated in short plain blocks whose totals are combined with
Neumaier compensation, keeping rounding near 1e-16 relative.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs

cnp.import_array()

# exp(-u^2/2) underflows to exactly 0.0 for |u| > 38.6; skipping those terms is exact
cdef double U_CUTOFF = 40.0
cdef Py_ssize_t BLOCK = 64


cdef inline double _hermite(double u, int order) noexcept nogil:
    cdef double u2 = u * u
    if order == 0:
        return 1.0
    if order == 2:
        return u2 - 1.0
    if order == 4:
        return (u2 - 6.0) * u2 + 3.0
    return ((u2 - 15.0) * u2 + 45.0) * u2 - 15.0


cdef inline void _neumaier_add(double *s, double *c, double v) noexcept nogil:
    cdef double t = s[0] + v
    if fabs(s[0]) >= fabs(v):
        c[0] += (s[0] - t) + v
    else:
        c[0] += (v - t) + s[0]
    s[0] = t


def pair_hermite_sum(x, double g, int order):
    if order not in (0, 2, 4, 6):
        raise ValueError(f"unsupported derivative order {order}")
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t i, j
    cdef double inv_g = 1.0 / g
    cdef double u, xi
    cdef Py_ssize_t jend
    cdef double bs, ts = 0.0, tc = 0.0
    with nogil:
        for i in range(n):
            xi = xv[i]
            j = i + 1
            while j < n:
                # plain sums over short blocks, compensated across blocks
                jend = j + BLOCK if j + BLOCK < n else n
                bs = 0.0
                while j < jend:
                    u = (xi - xv[j]) * inv_g
                    bs += _hermite(u, order) * exp(-0.5 * u * u)
                    j += 1
                _neumaier_add(&ts, &tc, bs)
    return n * _hermite(0.0, order) + 2.0 * (ts + tc)


def kde_grid(sample, double h, points):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] srt = np.sort(np.asarray(sample, dtype=np.float64))
    cdef const double[::1] sv = srt
    cdef const double[::1] pv = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = sv.shape[0]
    cdef Py_ssize_t m = pv.shape[0]
    out0 = np.empty(m)
    out1 = np.empty(m)
    cdef double[::1] s0 = out0
    cdef double[::1] s1 = out1
    cdef double[::1] lo_edge = np.ascontiguousarray(pv) - U_CUTOFF * h
    cdef double[::1] hi_edge = np.ascontiguousarray(pv) + U_CUTOFF * h
    cdef cnp.int64_t[::1] lo_idx = np.searchsorted(srt, lo_edge, side="left").astype(np.int64)
    cdef cnp.int64_t[::1] hi_idx = np.searchsorted(srt, hi_edge, side="right").astype(np.int64)
    cdef Py_ssize_t k, i, iend
    cdef double b0, b1
    cdef double inv_h = 1.0 / h
    cdef double u, e, x, a0, c0, a1, c1
    with nogil:
        for k in range(m):
            x = pv[k]
            a0 = 0.0
            c0 = 0.0
            a1 = 0.0
            c1 = 0.0
            i = lo_idx[k]
            while i < hi_idx[k]:
                iend = i + BLOCK if i + BLOCK < hi_idx[k] else hi_idx[k]
                b0 = 0.0
                b1 = 0.0
                while i < iend:
                    u = (x - sv[i]) * inv_h
                    e = exp(-0.5 * u * u)
                    b0 += e
                    b1 += u * e
                    i += 1
                _neumaier_add(&a0, &c0, b0)
                _neumaier_add(&a1, &c1, b1)
            s0[k] = a0 + c0
            s1[k] = a1 + c1
    return out0, out1
