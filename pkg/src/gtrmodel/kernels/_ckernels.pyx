# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernels; see ``_fallback.py`` for the reference semantics."""
import numpy as np

cimport numpy as cnp
from libc.math cimport nextafter, INFINITY

cnp.import_array()


cdef inline Py_ssize_t _locate(const double[::1] cdf, Py_ssize_t n, double u) noexcept nogil:
    # largest k in [0, n-1] with cdf[k] <= u
    cdef Py_ssize_t lo = 0, hi = n, mid
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if cdf[mid] <= u:
            lo = mid
        else:
            hi = mid
    return lo


cdef inline double _draw(const double[::1] bp, const double[::1] cdf, const double[::1] dens,
                         Py_ssize_t n, double u) noexcept nogil:
    cdef Py_ssize_t k = _locate(cdf, n, u)
    cdef double lo = bp[k]
    cdef double x = lo + (u - cdf[k]) / dens[k]
    cdef double top = nextafter(bp[k + 1], -INFINITY)
    if x > top:
        x = top
    if x < lo:
        x = lo
    return x


def inverse_cdf(const double[::1] u, const double[::1] breakpoints, const double[::1] cdf,
                const double[::1] densities):
    cdef Py_ssize_t i, m = u.shape[0], n = densities.shape[0]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            o[i] = _draw(breakpoints, cdf, densities, n, u[i])
    return out


def count_sequential(const double[::1] u1, const double[::1] u2,
                     const double[::1] bp1, const double[::1] cdf1, const double[::1] dens1,
                     double cut1,
                     const double[::1] bp2, const double[::1] cdf2, const double[::1] dens2,
                     double cut_after_yes, double cut_after_no):
    cdef Py_ssize_t i, m = u1.shape[0]
    cdef Py_ssize_t n1 = dens1.shape[0], n2 = dens2.shape[0]
    cdef long long c0 = 0, c1 = 0, c2 = 0, c3 = 0
    cdef double x1, x2
    with nogil:
        for i in range(m):
            x1 = _draw(bp1, cdf1, dens1, n1, u1[i])
            x2 = _draw(bp2, cdf2, dens2, n2, u2[i])
            if x1 < cut1:
                if x2 < cut_after_yes:
                    c0 += 1
                else:
                    c1 += 1
            else:
                if x2 < cut_after_no:
                    c2 += 1
                else:
                    c3 += 1
    return np.array([c0, c1, c2, c3], dtype=np.int64)
