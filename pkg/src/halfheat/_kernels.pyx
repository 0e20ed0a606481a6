# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled truncated-series kernels.

Both functions operate on flat coefficient arrays indexed through a product
table built by :mod:`halfheat.series`: entry ``n`` of the table says that
``a[p[n]] * b[q[n]]`` lands in ``c[r[n]]``.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def mul(const double[::1] a, const double[::1] b,
        const cnp.intp_t[::1] p, const cnp.intp_t[::1] q,
        const cnp.intp_t[::1] r, Py_ssize_t size):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(size)
    cdef double[::1] c = out
    cdef Py_ssize_t n, m = p.shape[0]
    with nogil:
        for n in range(m):
            c[r[n]] += a[p[n]] * b[q[n]]
    return out


def horner(const double[::1] delta, const double[::1] taylor,
           const cnp.intp_t[::1] p, const cnp.intp_t[::1] q,
           const cnp.intp_t[::1] r, Py_ssize_t size):
    """Evaluate sum_k taylor[k] * delta**k for a jet ``delta`` with zero constant term."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] acc_arr = np.zeros(size)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tmp_arr = np.zeros(size)
    cdef double[::1] acc = acc_arr
    cdef double[::1] tmp = tmp_arr
    cdef Py_ssize_t k, n, i, m = p.shape[0]
    cdef Py_ssize_t deg = taylor.shape[0] - 1
    with nogil:
        acc[0] = taylor[deg]
        for k in range(deg - 1, -1, -1):
            for i in range(size):
                tmp[i] = 0.0
            for n in range(m):
                tmp[r[n]] += acc[p[n]] * delta[q[n]]
            for i in range(size):
                acc[i] = tmp[i]
            acc[0] += taylor[k]
    return acc_arr
