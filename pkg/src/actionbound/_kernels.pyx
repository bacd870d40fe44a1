# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for ordered products of matrix exponentials.

The Python twin in ``_kernels_py`` has the same functions and signatures.
"""
import numpy as np

from libc.math cimport cos, sin, sqrt

ctypedef double complex cplx


cdef inline void _su2(const cplx* g, cplx* out) noexcept nogil:
    # out = exp(-i g) for a Hermitian 2x2 g stored row-major.
    cdef double a0 = 0.5 * (g[0].real + g[3].real)
    cdef double az = 0.5 * (g[0].real - g[3].real)
    cdef double ax = g[2].real
    cdef double ay = g[2].imag
    cdef double r = sqrt(ax * ax + ay * ay + az * az)
    cdef double c = cos(r)
    cdef double s = 1.0
    if r > 0.0:
        s = sin(r) / r
    cdef cplx ph = cos(a0) - 1j * sin(a0)
    cdef cplx mi = -1j * s
    out[0] = ph * (c + mi * az)
    out[3] = ph * (c - mi * az)
    out[1] = ph * mi * (ax - 1j * ay)
    out[2] = ph * mi * (ax + 1j * ay)


cdef inline void _mul2(const cplx* a, const cplx* b, cplx* out) noexcept nogil:
    out[0] = a[0] * b[0] + a[1] * b[2]
    out[1] = a[0] * b[1] + a[1] * b[3]
    out[2] = a[2] * b[0] + a[3] * b[2]
    out[3] = a[2] * b[1] + a[3] * b[3]


cdef inline void _muln(const cplx* a, const cplx* b, cplx* out, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef cplx acc
    for i in range(d):
        for j in range(d):
            acc = 0
            for k in range(d):
                acc = acc + a[i * d + k] * b[k * d + j]
            out[i * d + j] = acc


def expm_su2(const cplx[:, :, ::1] g):
    """``exp(-i g_k)`` for a stack of Hermitian 2x2 matrices."""
    cdef Py_ssize_t n = g.shape[0], k
    out = np.empty((n, 2, 2), dtype=np.complex128)
    cdef cplx[:, :, ::1] o = out
    with nogil:
        for k in range(n):
            _su2(&g[k, 0, 0], &o[k, 0, 0])
    return out


def chain(const cplx[:, :, ::1] e, const Py_ssize_t[::1] stops, const cplx[:, ::1] u0):
    """Running products ``e[s-1] ... e[0] u0`` recorded at each ``s`` in ``stops``."""
    cdef Py_ssize_t n = e.shape[0], d = e.shape[1], c = stops.shape[0]
    cdef Py_ssize_t k, j = 0, i
    out = np.empty((c, d, d), dtype=np.complex128)
    cdef cplx[:, :, ::1] o = out
    cur_arr = np.array(u0, dtype=np.complex128, order="C")
    tmp_arr = np.empty((d, d), dtype=np.complex128)
    cdef cplx[:, ::1] cur = cur_arr
    cdef cplx[:, ::1] tmp = tmp_arr
    cdef cplx* pc = &cur[0, 0]
    cdef cplx* pt = &tmp[0, 0]
    cdef cplx* sw
    with nogil:
        while j < c and stops[j] == 0:
            for i in range(d * d):
                (&o[j, 0, 0])[i] = pc[i]
            j += 1
        for k in range(n):
            if d == 2:
                _mul2(&e[k, 0, 0], pc, pt)
            else:
                _muln(&e[k, 0, 0], pc, pt, d)
            sw = pc
            pc = pt
            pt = sw
            while j < c and stops[j] == k + 1:
                for i in range(d * d):
                    (&o[j, 0, 0])[i] = pc[i]
                j += 1
    return out


def chain_su2(const cplx[:, :, ::1] g, const Py_ssize_t[::1] stops, const cplx[:, ::1] u0):
    """Fused ``chain(expm_su2(g), stops, u0)`` without the intermediate stack."""
    cdef Py_ssize_t n = g.shape[0], c = stops.shape[0]
    cdef Py_ssize_t k, j = 0, i
    out = np.empty((c, 2, 2), dtype=np.complex128)
    cdef cplx[:, :, ::1] o = out
    cdef cplx cur[4]
    cdef cplx tmp[4]
    cdef cplx ex[4]
    for i in range(4):
        cur[i] = u0[i // 2, i % 2]
    with nogil:
        while j < c and stops[j] == 0:
            for i in range(4):
                (&o[j, 0, 0])[i] = cur[i]
            j += 1
        for k in range(n):
            _su2(&g[k, 0, 0], ex)
            _mul2(ex, cur, tmp)
            for i in range(4):
                cur[i] = tmp[i]
            while j < c and stops[j] == k + 1:
                for i in range(4):
                    (&o[j, 0, 0])[i] = cur[i]
                j += 1
    return out
