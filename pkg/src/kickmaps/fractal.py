"""Box-counting generalized dimensions D_q of eigenphase sets on [-pi, pi)."""

from dataclasses import dataclass
import math

import numpy as np
from scipy import stats

from .errors import ParameterError
from .spectrum import RationalPlanck

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DqEstimate:
    q: float
    dq: float
    fit_r2: float
    scales_used: tuple


def default_scales(k_lo=3, k_hi=9):
    """Box sizes 2 pi / 2^k for k = k_lo .. k_hi."""
    return [TWO_PI / 2**k for k in range(k_lo, k_hi + 1)]


def box_measures(spectrum, eps):
    """Fractions of the points falling in each of ceil(2 pi / eps) boxes covering the circle."""
    pts = np.asarray(spectrum, dtype=float).ravel()
    if pts.size == 0:
        raise ParameterError("spectrum is empty")
    if not 0 < eps <= TWO_PI:
        raise ParameterError(f"box size must lie in (0, 2 pi], got {eps}")
    n_boxes = math.ceil(TWO_PI / eps - 1e-9)
    # right-closed boxes (-pi + i eps, -pi + (i + 1) eps]; -pi itself is +pi on the circle
    x = np.mod(pts + math.pi, TWO_PI)
    x = np.where(x == 0.0, TWO_PI, x)
    idx = np.clip(np.ceil(x / eps).astype(int) - 1, 0, n_boxes - 1)
    counts = np.bincount(idx, minlength=n_boxes)
    return counts / pts.size


def partition_sum(spectrum, q, eps):
    """sum over occupied boxes of mu_i^q; for q = 0 the occupied-box count."""
    mu = box_measures(spectrum, eps)
    mu = mu[mu > 0]
    if q == 0:
        return float(mu.size)
    return float(np.sum(mu**q))


def information_sum(spectrum, eps):
    """sum mu_i log mu_i, the q -> 1 limit used for D_1."""
    mu = box_measures(spectrum, eps)
    mu = mu[mu > 0]
    return float(np.sum(mu * np.log(mu)))


def dq_estimate(spectrum, q, eps_list=None, saturation=2.0):
    """Least-squares D_q over the given box sizes.

    Scales whose occupied-box count comes within ``saturation`` x of the number
    of points are dropped (resolution floor).
    """
    pts = np.asarray(spectrum, dtype=float).ravel()
    if pts.size == 0:
        raise ParameterError("spectrum is empty")
    eps_list = default_scales() if eps_list is None else list(eps_list)
    kept = [e for e in eps_list if partition_sum(pts, 0, e) * saturation <= pts.size]
    if len(kept) < 4:
        raise ParameterError(f"need >= 4 usable scales, have {len(kept)}")
    if max(kept) / min(kept) < 4.0 - 1e-12:
        raise ParameterError("scales must span at least two octaves")
    log_eps = np.log(kept)
    if np.ptp(log_eps) == 0:
        raise ParameterError("degenerate fit: all scales equal")
    if abs(q - 1.0) < 1e-12:
        y = np.array([information_sum(pts, e) for e in kept])
        fit = stats.linregress(log_eps, y)
        dq = fit.slope
    else:
        y = np.log([partition_sum(pts, q, e) for e in kept])
        fit = stats.linregress(log_eps, y)
        dq = fit.slope / (q - 1.0)
    r2 = float(fit.rvalue**2) if np.isfinite(fit.rvalue) else 1.0
    return DqEstimate(q=float(q), dq=float(dq), fit_r2=r2, scales_used=tuple(kept))


def convergents(x, b_max):
    """Continued-fraction convergents a/b of x in (0, 1) with 0 < a and b <= b_max."""
    if b_max < 2:
        raise ParameterError("b_max must be >= 2")
    if not 0 < x < 1:
        raise ParameterError(f"x must lie in (0, 1), got {x}")
    out = []
    h_prev, h = 0, 1  # numerators h_{n-2}, h_{n-1}
    k_prev, k = 1, 0  # denominators
    rem = x
    for _ in range(64):
        a_n = math.floor(rem)
        h_prev, h = h, a_n * h + h_prev
        k_prev, k = k, a_n * k + k_prev
        if k > b_max:
            break
        if h > 0:
            out.append(RationalPlanck(h, k))
        frac = rem - a_n
        if abs(x - h / k) < 1e-13 or frac < 1e-13:
            break
        rem = 1.0 / frac
    return out


GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def golden_planck_fraction():
    """hbar / 2 pi = 1 / (1 + sigma) for hbar = 2 pi / (1 + sigma)."""
    return 1.0 / (1.0 + GOLDEN)
