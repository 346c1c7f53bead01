"""Kick-by-kick evolution, variance growth, and momentum-staircase detection."""

from collections import Counter
from dataclasses import dataclass, field
import logging

import numpy as np
from scipy import stats

from .core import DEFAULT_N, EDGE_TOL, LatticeState, basis_state, centered_window, edge_tail
from .errors import NumericalError, ParameterError, WindowOverflowError
from .floquet import Propagator

log = logging.getLogger(__name__)

MAX_WINDOW = 2**16
TRANSIENT_KICKS = 10


@dataclass
class TimeSeries:
    kicks: list
    variance: list
    survival: list
    mean: list
    snapshots: list = field(default_factory=list)  # (kick, momenta, P)
    m_min: int = 0
    N: int = 0
    final: LatticeState | None = None


PRECISIONS = {"extended": np.clongdouble, "double": np.complex128}


def evolve(initial, spec, n_kicks, snapshot_at=(), reference=None, precision="extended"):
    """Apply ``spec`` n_kicks times, recording variance and survival at every kick
    (kick 0 included).

    ``precision="double"`` is several times faster; its FFT rounding moves the
    norm by roughly 2e-16 per kick.
    """
    if n_kicks < 1:
        raise ParameterError("n_kicks must be >= 1")
    reference = initial if reference is None else reference
    if not reference.same_window(initial):
        raise ParameterError("reference state lives on a different window")
    if precision not in PRECISIONS:
        raise ParameterError(f"precision must be one of {sorted(PRECISIONS)}")
    prop = Propagator(spec, initial.m_min, initial.N, PRECISIONS[precision])
    m = initial.momenta.astype(float)
    ref = reference.amplitudes
    snap = set(int(k) for k in snapshot_at)
    amps = np.array(initial.amplitudes, dtype=prop.dtype)
    kicks, var, surv, mean, snaps = [], [], [], [], []

    def record(k, a):
        P = (np.abs(a) ** 2).astype(float)
        total = P.sum()
        mu = np.dot(m, P) / total
        kicks.append(k)
        mean.append(float(mu))
        var.append(float(max(np.dot((m - mu) ** 2, P) / total, 0.0)))
        surv.append(float(abs(np.vdot(ref, a.astype(complex))) ** 2))
        if k in snap:
            snaps.append((k, initial.momenta, P / total))
        return P

    record(0, amps)
    for k in range(1, n_kicks + 1):
        amps = prop.advance(amps)
        P = record(k, amps)
        tail = edge_tail(P)
        if tail > EDGE_TOL:
            raise WindowOverflowError(k, tail, initial.N)
    return TimeSeries(kicks, var, surv, mean, snaps, initial.m_min, initial.N,
                      LatticeState(initial.m_min, amps.astype(complex)))


def evolve_from_basis(spec, n_kicks, m0=0, N=DEFAULT_N, max_N=MAX_WINDOW, snapshot_at=(),
                      precision="extended"):
    """Evolve |m0> on a centred window, doubling the window on overflow."""
    while True:
        m_min = centered_window(N) + m0
        try:
            return evolve(basis_state(m0, m_min, N), spec, n_kicks, snapshot_at, precision=precision)
        except WindowOverflowError as exc:
            if 2 * N > max_N:
                raise
            log.info("window overflow at kick %d with N=%d; retrying with N=%d", exc.kick, N, 2 * N)
            N *= 2


def diffusion_exponent(series, fit_window):
    """Slope alpha of log variance against log kick over [k_lo, k_hi], and R^2."""
    k_lo, k_hi = fit_window
    if k_lo < TRANSIENT_KICKS:
        raise ParameterError(f"fit window must start at kick >= {TRANSIENT_KICKS}")
    kicks = np.asarray(series.kicks)
    if k_hi > kicks.max() or k_lo >= k_hi:
        raise ParameterError(f"fit window {fit_window} outside recorded kicks")
    sel = (kicks >= k_lo) & (kicks <= k_hi)
    v = np.asarray(series.variance)[sel]
    if np.any(v <= 0):
        raise NumericalError("non-positive variance inside the fit window")
    fit = stats.linregress(np.log(kicks[sel]), np.log(v))
    return float(fit.slope), float(fit.rvalue**2)


def _profile_arrays(profile):
    if isinstance(profile, tuple) and len(profile) == 2 and np.ndim(profile[0]) == 1:
        m, P = profile
    else:
        arr = np.asarray(profile, dtype=float)
        m, P = arr[:, 0], arr[:, 1]
    return np.asarray(m, dtype=int), np.asarray(P, dtype=float)


def step_edges(profile, drop_threshold=10.0, site_ratio=2.0, floor=1e-25):
    """Momenta of the step edges on the m > 0 tail.

    The tail is replaced by its non-increasing upper envelope so interference
    dips inside a plateau are ignored. Runs of adjacent sites where the envelope
    falls by at least ``site_ratio`` are grouped; a run is an edge when its total
    drop exceeds ``drop_threshold``, located at its steepest site. Sites below
    ``floor`` x max P are treated as numerical noise.
    """
    if drop_threshold <= 1:
        raise ParameterError("drop_threshold must exceed 1")
    m, P = _profile_arrays(profile)
    if np.count_nonzero(P > 1e-300 * P.max()) < 3:
        raise ParameterError("profile has fewer than 3 resolvable sites")
    order = np.argsort(m)
    m, P = m[order], P[order]
    sel = m > 0
    m, P = m[sel], P[sel]
    env = np.maximum.accumulate(P[::-1])[::-1]
    keep = env > floor * P.max() if P.size else env > 0
    m, env = m[keep], env[keep]
    if m.size < 2:
        return []
    ratio = env[:-1] / env[1:]
    edges = []
    i = 0
    while i < ratio.size:
        if ratio[i] < site_ratio:
            i += 1
            continue
        j = i
        while j + 1 < ratio.size and ratio[j + 1] >= site_ratio:
            j += 1
        run = ratio[i:j + 1]
        if np.prod(run) > drop_threshold:
            edges.append(int(m[i + int(np.argmax(run))]))
        i = j + 1
    return edges


def staircase_widths(profile, drop_threshold=10.0, **kwargs):
    """Plateau widths between consecutive step edges, ordered by position."""
    edges = step_edges(profile, drop_threshold, **kwargs)
    return [b - a for a, b in zip(edges, edges[1:])]


def modal_width(widths, min_count=3):
    """Most common width if it occurs at least ``min_count`` times, else None."""
    if not widths:
        return None
    counts = Counter(widths)
    width, n = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
    return width if n >= min_count else None


def snapshot_widths(series, drop_threshold=10.0, **kwargs):
    """Widths pooled over every snapshot of a run."""
    out = []
    for _, m, P in series.snapshots:
        out.extend(staircase_widths((m, P), drop_threshold, **kwargs))
    return out
