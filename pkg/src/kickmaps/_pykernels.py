"""Pure-Python/numpy fallback for the compiled kernels in ``_ckernels.pyx``."""

import math

import numpy as np

TWO_PI = 2.0 * math.pi
_BIG = 1e250
_SMALL = 1e-250


def _wrap(x):
    return np.mod(x, TWO_PI)


def bessel_jn(nmax, x):
    """J_0(x) ... J_nmax(x) by Miller's downward recurrence, normalized by
    J_0 + 2 * sum_k J_2k = 1."""
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    out = np.zeros(nmax + 1)
    ax = abs(float(x))
    if ax < 1e-8:
        # leading series term; the x^2 correction is below double precision
        term = 1.0
        out[0] = 1.0
        for k in range(1, nmax + 1):
            term *= 0.5 * float(x) / k
            out[k] = term
        return out
    scale_max = max(nmax, ax)
    start = int(scale_max + 30 + math.sqrt(60.0 * (scale_max + 1.0)))
    start += start % 2
    jp1, j, norm = 0.0, _SMALL, 0.0
    for k in range(start, 0, -1):
        jm1 = (2.0 * k / ax) * j - jp1
        jp1, j = j, jm1
        if abs(j) > _BIG:
            j *= _SMALL
            jp1 *= _SMALL
            norm *= _SMALL
            out *= _SMALL
        if k - 1 <= nmax:
            out[k - 1] = j
        if (k - 1) % 2 == 0 and k > 1:
            norm += 2.0 * j
    norm += j
    out /= norm
    if x < 0:
        out[1::2] *= -1.0
    return out


def dkrm_orbits(q0, p0, K1, K2, n_steps):
    q = _wrap(np.array(q0, dtype=float).ravel())
    p = np.array(p0, dtype=float).ravel()
    qs = np.empty((n_steps + 1, q.size))
    ps = np.empty((n_steps + 1, q.size))
    qs[0], ps[0] = q, p
    for t in range(1, n_steps + 1):
        p = p + K2 * np.sin(q)
        q = _wrap(q + p)
        p = p + K1 * np.sin(q)
        q = _wrap(q - p)
        qs[t], ps[t] = q, p
    return qs, ps


def harper_orbits(Q0, P0, K1, K2, n_steps):
    Q = _wrap(np.array(Q0, dtype=float).ravel())
    P = np.array(P0, dtype=float).ravel()
    qs = np.empty((n_steps + 1, Q.size))
    ps = np.empty((n_steps + 1, Q.size))
    qs[0], ps[0] = Q, P
    for t in range(1, n_steps + 1):
        P = P + K2 * np.sin(Q)
        Q = _wrap(Q - K1 * np.sin(P))
        qs[t], ps[t] = Q, P
    return qs, ps
