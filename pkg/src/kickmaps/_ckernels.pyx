# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, fabs, sqrt, fmod, M_PI

cnp.import_array()

cdef double TWO_PI = 2.0 * M_PI
cdef double BIG = 1e250
cdef double SMALL = 1e-250


cdef inline double _wrap(double x) nogil:
    x = fmod(x, TWO_PI)
    if x < 0.0:
        x += TWO_PI
    if x >= TWO_PI:
        x -= TWO_PI
    return x


def bessel_jn(int nmax, double x):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(nmax + 1, dtype=np.float64)
    cdef double ax = fabs(x)
    cdef double TINY = 1e-8
    cdef int start, k
    cdef double jp1, j, jm1, norm, scale_max
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    if ax < TINY:
        # leading series term; the x^2 correction is below double precision
        jm1 = 1.0
        out[0] = 1.0
        for k in range(1, nmax + 1):
            jm1 *= 0.5 * x / k
            out[k] = jm1
        return out
    scale_max = nmax if nmax > ax else ax
    start = <int>(scale_max + 30 + sqrt(60.0 * (scale_max + 1.0)))
    start += start % 2
    jp1 = 0.0
    j = SMALL
    norm = 0.0
    for k in range(start, 0, -1):
        jm1 = (2.0 * k / ax) * j - jp1
        jp1 = j
        j = jm1
        if fabs(j) > BIG:
            j *= SMALL
            jp1 *= SMALL
            norm *= SMALL
            out *= SMALL
        if k - 1 <= nmax:
            out[k - 1] = j
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j
    norm += j
    out /= norm
    if x < 0.0:
        out[1::2] *= -1.0
    return out


def dkrm_orbits(q0, p0, double K1, double K2, int n_steps):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] qi = np.ascontiguousarray(q0, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pi = np.ascontiguousarray(p0, dtype=np.float64).ravel()
    cdef Py_ssize_t m = qi.shape[0], s, t
    cdef cnp.ndarray[cnp.float64_t, ndim=2] qs = np.empty((n_steps + 1, m))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ps = np.empty((n_steps + 1, m))
    cdef double q, p
    for s in range(m):
        q = _wrap(qi[s])
        p = pi[s]
        qs[0, s] = q
        ps[0, s] = p
        for t in range(1, n_steps + 1):
            p = p + K2 * sin(q)
            q = _wrap(q + p)
            p = p + K1 * sin(q)
            q = _wrap(q - p)
            qs[t, s] = q
            ps[t, s] = p
    return qs, ps


def harper_orbits(Q0, P0, double K1, double K2, int n_steps):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] qi = np.ascontiguousarray(Q0, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pi = np.ascontiguousarray(P0, dtype=np.float64).ravel()
    cdef Py_ssize_t m = qi.shape[0], s, t
    cdef cnp.ndarray[cnp.float64_t, ndim=2] qs = np.empty((n_steps + 1, m))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ps = np.empty((n_steps + 1, m))
    cdef double q, p
    for s in range(m):
        q = _wrap(qi[s])
        p = pi[s]
        qs[0, s] = q
        ps[0, s] = p
        for t in range(1, n_steps + 1):
            p = p + K2 * sin(q)
            q = _wrap(q - K1 * sin(p))
            qs[t, s] = q
            ps[t, s] = p
    return qs, ps
