# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lattice enumeration and Gaussian sums.

Drop-in replacement for :mod:`tubetheta._kernels_py`.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, ceil, floor, exp, cos, sin, fabs, M_PI

cnp.import_array()

NAME = "compiled"

cdef double _SLACK = 1e-9


def enumerate_points(gram, R, double bound, long outer_lo, long outer_hi, long max_points):
    """Depth-first Fincke-Pohst enumeration; see the Python version."""
    cdef double[:, ::1] G = np.ascontiguousarray(gram, dtype=np.float64)
    cdef double[:, ::1] Rm = np.ascontiguousarray(R, dtype=np.float64)
    cdef Py_ssize_t n = G.shape[0]
    if bound < 0:
        return np.zeros((0, n), np.int64), np.zeros(0), False

    cdef long[::1] k = np.zeros(n, np.int64)
    cdef long[::1] hi = np.zeros(n, np.int64)
    cdef double[::1] center = np.zeros(n)
    cdef double[::1] rem = np.zeros(n + 1)
    cdef Py_ssize_t cap = 1024
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.zeros((cap, n), np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] norms = np.zeros(cap)
    cdef Py_ssize_t count = 0, i, j, a
    cdef double c, w, d, q, s
    cdef long lo_i, hi_i
    cdef bint descend

    rem[n] = bound
    i = n - 1
    descend = True
    while True:
        if descend:
            c = 0.0
            for j in range(i + 1, n):
                c -= Rm[i, j] * k[j]
            c /= Rm[i, i]
            center[i] = c
            w = sqrt(rem[i + 1] if rem[i + 1] > 0 else 0.0) / Rm[i, i] * (1 + _SLACK) + _SLACK
            lo_i = <long>ceil(c - w)
            hi_i = <long>floor(c + w)
            if i == n - 1:
                if lo_i < outer_lo:
                    lo_i = outer_lo
                if hi_i > outer_hi:
                    hi_i = outer_hi
            k[i] = lo_i
            hi[i] = hi_i
        else:
            k[i] += 1
        if k[i] > hi[i]:
            if i == n - 1:
                break
            i += 1
            descend = False
            continue
        d = k[i] - center[i]
        rem[i] = rem[i + 1] - Rm[i, i] * Rm[i, i] * d * d
        if rem[i] < -_SLACK * (bound if bound > 1 else 1.0):
            # outside the ellipsoid; try the next value
            descend = False
            continue
        if i > 0:
            i -= 1
            descend = True
            continue
        # leaf: exact quadratic form
        q = 0.0
        for a in range(n):
            s = 0.0
            for j in range(n):
                s += G[a, j] * k[j]
            q += k[a] * s
        descend = False
        if q <= bound:
            if count >= max_points:
                return np.zeros((0, n), np.int64), np.zeros(0), True
            if count == cap:
                cap *= 2
                out = np.resize(out, (cap, n))
                norms = np.resize(norms, cap)
            for a in range(n):
                out[count, a] = k[a]
            norms[count] = q
            count += 1
    return out[:count].copy(), norms[:count].copy(), False


def gauss_sum(ks, A, b):
    """Neumaier-compensated sum of exp(i pi (k^T A k + b.k)) in row order."""
    cdef long[:, ::1] K = np.ascontiguousarray(ks, dtype=np.int64)
    cdef double complex[:, ::1] Am = np.ascontiguousarray(A, dtype=np.complex128)
    cdef double complex[::1] bv = np.ascontiguousarray(b, dtype=np.complex128)
    cdef Py_ssize_t N = K.shape[0], n = K.shape[1], p, a, j
    cdef double complex q, s
    cdef double mag, tr, ti
    cdef double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0, t
    for p in range(N):
        q = 0.0
        for a in range(n):
            s = bv[a]
            for j in range(n):
                s = s + Am[a, j] * K[p, j]
            q = q + s * K[p, a]
        mag = exp(-M_PI * q.imag)
        tr = mag * cos(M_PI * q.real)
        ti = mag * sin(M_PI * q.real)
        t = sr + tr
        if fabs(sr) >= fabs(tr):
            cr += (sr - t) + tr
        else:
            cr += (tr - t) + sr
        sr = t
        t = si + ti
        if fabs(si) >= fabs(ti):
            ci += (si - t) + ti
        else:
            ci += (ti - t) + si
        si = t
    return complex(sr + cr, si + ci)


def gauss_sum_many(ks, A, bs, chunk=4096):
    """Plain sums for each row of ``bs``, sharing points and quadratic part."""
    cdef long[:, ::1] K = np.ascontiguousarray(ks, dtype=np.int64)
    cdef double complex[:, ::1] Am = np.ascontiguousarray(A, dtype=np.complex128)
    cdef double complex[:, ::1] B = np.ascontiguousarray(bs, dtype=np.complex128)
    cdef Py_ssize_t N = K.shape[0], n = K.shape[1], M = B.shape[0], p, a, j, r
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] base = np.empty(N, np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(M, np.complex128)
    cdef double complex q, s, acc
    cdef double mag
    for p in range(N):
        q = 0.0
        for a in range(n):
            s = 0.0
            for j in range(n):
                s = s + Am[a, j] * K[p, j]
            q = q + s * K[p, a]
        mag = exp(-M_PI * q.imag)
        base[p] = mag * (cos(M_PI * q.real) + 1j * sin(M_PI * q.real))
    for r in range(M):
        acc = 0.0
        for p in range(N):
            q = 0.0
            for a in range(n):
                q = q + B[r, a] * K[p, a]
            mag = exp(-M_PI * q.imag)
            acc = acc + base[p] * mag * (cos(M_PI * q.real) + 1j * sin(M_PI * q.real))
        out[r] = acc
    return out
