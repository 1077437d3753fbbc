# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled t-SNE inner kernels: Student-t affinity gradient and KL cost.

Mirrors iropskit.dimred._tsne_numpy; selected automatically at import when
the extension built. The optimizer loop only needs the gradient, so the KL
(with its n^2 logs) is a separate entry point evaluated at trace-recording
points.
"""

from libc.math cimport log

import numpy as np

QMIN = 1e-12


def backend_name():
    return "compiled"


def _student_numerators(double[:, ::1] y, double[:, ::1] num):
    """Fill num with (1 + |y_i - y_j|^2)^-1, zero diagonal; returns the sum."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t d = y.shape[1]
    cdef Py_ssize_t i, j, c
    cdef double diff, sq, v, z = 0.0
    for i in range(n):
        num[i, i] = 0.0
        for j in range(i + 1, n):
            sq = 0.0
            for c in range(d):
                diff = y[i, c] - y[j, c]
                sq += diff * diff
            v = 1.0 / (1.0 + sq)
            num[i, j] = v
            num[j, i] = v
            z += 2.0 * v
    return z


def gradient(double[:, ::1] p, double[:, ::1] y):
    """Analytic KL gradient: 4 sum_j (p_ij - q_ij) num_ij (y_i - y_j)."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t d = y.shape[1]
    if p.shape[0] != n or p.shape[1] != n:
        raise ValueError("affinity matrix shape does not match embedding")

    num_arr = np.empty((n, n), dtype=np.float64)
    grad_arr = np.zeros((n, d), dtype=np.float64)
    cdef double[:, ::1] num = num_arr
    cdef double[:, ::1] grad = grad_arr
    cdef double inv_z = 1.0 / _student_numerators(y, num)

    cdef Py_ssize_t i, j, c
    cdef double mult, delta
    for i in range(n):
        for j in range(i + 1, n):
            # p and q are both symmetric, so each pair is visited once
            mult = 4.0 * (p[i, j] - num[i, j] * inv_z) * num[i, j]
            for c in range(d):
                delta = mult * (y[i, c] - y[j, c])
                grad[i, c] += delta
                grad[j, c] -= delta
    return grad_arr


def kl_divergence(double[:, ::1] p, double[:, ::1] y):
    """KL(P || Q) for the embedding y; q floored at 1e-12 inside the log."""
    cdef Py_ssize_t n = y.shape[0]
    if p.shape[0] != n or p.shape[1] != n:
        raise ValueError("affinity matrix shape does not match embedding")

    num_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] num = num_arr
    cdef double inv_z = 1.0 / _student_numerators(y, num)

    cdef Py_ssize_t i, j
    cdef double q, kl = 0.0, pij
    for i in range(n):
        for j in range(i + 1, n):
            pij = p[i, j]
            if pij > 0.0:
                q = num[i, j] * inv_z
                if q < QMIN:
                    q = QMIN
                kl += 2.0 * pij * log(pij / q)
    return kl


def kl_and_grad(double[:, ::1] p, double[:, ::1] y):
    """Convenience wrapper returning (kl, grad)."""
    return kl_divergence(p, y), gradient(p, y)
