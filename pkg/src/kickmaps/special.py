"""Integer-order Bessel functions of the first kind and Jacobi-Anger kick elements."""

import numpy as np

from ._backend import kernels

_MINUS_I_POWERS = np.array([1.0, -1.0j, -1.0, 1.0j])


def bessel_j(orders, x):
    """J_n(x) for an integer array of orders (negative allowed)."""
    orders = np.asarray(orders, dtype=int)
    if orders.size == 0:
        return np.zeros(orders.shape)
    nmax = int(np.abs(orders).max())
    table = kernels.bessel_jn(nmax, float(x))
    n = np.abs(orders)
    vals = table[n]
    # J_{-n} = (-1)^n J_n
    neg = (orders < 0) & (n % 2 == 1)
    return np.where(neg, -vals, vals)


def kick_element(diff, c):
    """<m + diff| exp(-i c cos q) |m> = (-i)^diff J_diff(c)."""
    diff = np.asarray(diff, dtype=int)
    return _MINUS_I_POWERS[np.mod(diff, 4)] * bessel_j(diff, c)
