# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled RK4 stepper for the double-bracket flow dH/ds = [[b, H], H].

``b`` is the diagonal of the grading matrix, so the generator
``eta = [b, H]`` is formed entrywise as ``(b_i - b_j) * H_ij``.
"""
import numpy as np
cimport numpy as cnp

ctypedef double complex cplx


cdef void _rhs(const cplx[:, ::1] h, const double[::1] b, cplx[:, ::1] eta,
               cplx[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t i, j, k
    cdef cplx acc
    for i in range(n):
        for j in range(n):
            eta[i, j] = (b[i] - b[j]) * h[i, j]
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + eta[i, k] * h[k, j] - h[i, k] * eta[k, j]
            out[i, j] = acc


def rk4_steps(cnp.ndarray h0, cnp.ndarray b0, double step, Py_ssize_t nsteps):
    """Advance ``h0`` by ``nsteps`` RK4 steps of size ``step``; returns a new array."""
    cdef cplx[:, ::1] h = np.array(h0, dtype=np.complex128, order="C", copy=True)
    cdef const double[::1] b = np.ascontiguousarray(b0, dtype=np.float64)
    cdef Py_ssize_t n = h.shape[0]
    cdef cplx[:, ::1] k1 = np.empty((n, n), np.complex128)
    cdef cplx[:, ::1] k2 = np.empty((n, n), np.complex128)
    cdef cplx[:, ::1] k3 = np.empty((n, n), np.complex128)
    cdef cplx[:, ::1] k4 = np.empty((n, n), np.complex128)
    cdef cplx[:, ::1] tmp = np.empty((n, n), np.complex128)
    cdef cplx[:, ::1] eta = np.empty((n, n), np.complex128)
    cdef Py_ssize_t it, i, j
    cdef double half = 0.5 * step
    cdef double sixth = step / 6.0
    with nogil:
        for it in range(nsteps):
            _rhs(h, b, eta, k1)
            for i in range(n):
                for j in range(n):
                    tmp[i, j] = h[i, j] + half * k1[i, j]
            _rhs(tmp, b, eta, k2)
            for i in range(n):
                for j in range(n):
                    tmp[i, j] = h[i, j] + half * k2[i, j]
            _rhs(tmp, b, eta, k3)
            for i in range(n):
                for j in range(n):
                    tmp[i, j] = h[i, j] + step * k3[i, j]
            _rhs(tmp, b, eta, k4)
            for i in range(n):
                for j in range(n):
                    h[i, j] = h[i, j] + sixth * (k1[i, j] + 2 * k2[i, j] + 2 * k3[i, j] + k4[i, j])
    return np.asarray(h)
