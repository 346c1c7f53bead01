"""Quasi-energy spectra by Bloch reduction at rational hbar / 2 pi = a / b.

Quasi-energies are eigenphases, lambda = exp(i eps) with eps in [-pi, pi).
With this branch the kicked Harper map at hbar = 4 pi fills
[-(K + L)/hbar, (K - L)/hbar].
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import math
import os

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NumericalError, ParameterError
from .floquet import KHM, DKRMGeneral, DKRMResonant, harper_kinetic_angle, quadratic_phase

TWO_PI = 2.0 * math.pi
UNIMODULAR_TOL = 1e-10
RESIDUAL_TOL = 1e-8
REFINE_BELOW = 1e-3
DEFAULT_N_BETA = 64


@dataclass(frozen=True, order=True)
class RationalPlanck:
    """hbar = 2 pi a / b with gcd(a, b) = 1 and 0 < a/b <= 2."""

    a: int
    b: int

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ParameterError(f"a/b must be positive, got {self.a}/{self.b}")
        if math.gcd(self.a, self.b) != 1:
            raise ParameterError(f"{self.a}/{self.b} is not in lowest terms")
        if Fraction(self.a, self.b) > 2:
            raise ParameterError(f"a/b = {self.a}/{self.b} exceeds 2 (hbar > 4 pi)")

    @classmethod
    def from_fraction(cls, frac):
        frac = Fraction(frac)
        return cls(frac.numerator, frac.denominator)

    @property
    def value(self):
        return TWO_PI * self.a / self.b

    @property
    def fraction(self):
        return Fraction(self.a, self.b)

    def mirror(self):
        """hbar -> 2 pi - hbar (requires a/b < 1)."""
        return RationalPlanck.from_fraction(1 - self.fraction)

    def __str__(self):
        return f"{self.a}/{self.b}"


@dataclass
class BandSpectrum:
    planck: RationalPlanck
    period: int
    bloch_angles: np.ndarray
    eigenphases: np.ndarray  # (n_beta, period), sorted per angle in the cut frame
    bands: list = field(default_factory=list)  # (eps_min, eps_max, width)
    branch_ranges: np.ndarray | None = None  # (period, 2) per-branch extremes

    def points(self):
        return self.eigenphases.ravel()


def farey(order, upper=1):
    """Reduced fractions a/b with b <= order and 0 < a/b <= upper, ascending."""
    out = set()
    for b in range(1, order + 1):
        for a in range(1, int(upper * b) + 1):
            if math.gcd(a, b) == 1:
                out.add(Fraction(a, b))
    return [RationalPlanck.from_fraction(f) for f in sorted(out)]


def kinetic_period(spec, planck):
    """Translation period b' of the momentum-diagonal phases."""
    if isinstance(spec, KHM):
        return planck.b
    return planck.b if (planck.a * planck.b) % 2 == 0 else 2 * planck.b


def _require_rational(spec, planck):
    if isinstance(spec, DKRMGeneral):
        if not spec.on_resonance:
            raise ParameterError("Bloch reduction needs the resonant reduction T hbar = 4 pi")
        spec = spec.reduced()
    if abs(spec.planck - planck.value) > 1e-9 * max(1.0, planck.value):
        raise ParameterError(
            f"spec has hbar = {spec.planck!r}, not 2 pi * {planck} = {planck.value!r}"
        )
    return spec


def bloch_kick(c, period, beta):
    """Bloch block of exp(-i c cos q): V diag(exp(-i c cos q_k)) V^dagger,
    q_k = (2 pi k - beta) / period. Exact; no Bessel truncation."""
    k = np.arange(period)
    q = (TWO_PI * k - beta) / period
    V = np.exp(-1j * np.outer(k, q)) / math.sqrt(period)
    return (V * np.exp(-1j * c * np.cos(q))[None, :]) @ V.conj().T


def bloch_operator(spec, planck, beta):
    """U(beta)_{r r'} = sum_s exp(i beta s) <r|U|r' + s b'>, r, r' = 0 .. b' - 1."""
    spec = _require_rational(spec, planck)
    period = kinetic_period(spec, planck)
    r = np.arange(period)
    if isinstance(spec, KHM):
        kin = np.exp(-1j * spec.l * np.cos(harper_kinetic_angle(r, spec.hbar)))
        return kin[:, None] * bloch_kick(spec.k, period, beta)
    dplus = np.exp(1j * quadratic_phase(r, spec.hbar_tilde))
    K1 = bloch_kick(spec.k1, period, beta)
    K2 = bloch_kick(spec.k2, period, beta)
    return (dplus[:, None] * K2 * dplus.conj()[None, :]) @ K1


def _phases(eigvals):
    eps = np.angle(eigvals)
    return np.where(eps >= math.pi, eps - TWO_PI, eps)


def bloch_eigenphases(spec, planck, betas, validate=True):
    """Eigenphases for each beta, shape (len(betas), b'), unsorted."""
    mats = np.stack([bloch_operator(spec, planck, beta) for beta in betas])
    if not validate:
        return _phases(np.linalg.eigvals(mats))
    vals, vecs = np.linalg.eig(mats)
    for i, beta in enumerate(betas):
        dev = np.max(np.abs(np.abs(vals[i]) - 1.0))
        if dev > UNIMODULAR_TOL:
            raise NumericalError(f"eigenvalue off the unit circle by {dev:.2e} at beta={beta}")
        resid = np.max(np.linalg.norm(mats[i] @ vecs[i] - vecs[i] * vals[i], axis=0))
        if resid > RESIDUAL_TOL:
            raise NumericalError(f"eigenvector residual {resid:.2e} at beta={beta}")
    return _phases(vals)


def _largest_gap_cut(points):
    """A cut angle in the middle of the widest empty arc of the circle."""
    p = np.sort(np.mod(points, TWO_PI))
    if p.size == 1:
        return (p[0] + math.pi) % TWO_PI
    gaps = np.diff(np.concatenate([p, [p[0] + TWO_PI]]))
    i = int(np.argmax(gaps))
    return (p[i] + gaps[i] / 2.0) % TWO_PI


def _to_frame(eps, cut):
    """Phases re-expressed in [cut, cut + 2 pi)."""
    return cut + np.mod(eps - cut, TWO_PI)


def _wrap(x):
    return (x + math.pi) % TWO_PI - math.pi


def _merge(intervals, tol):
    intervals = sorted(intervals)
    merged = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return merged


def _refine(spec, planck, cut, j, betas, values, sign):
    """Golden-section polish of branch j's extremum (sign=+1 max, -1 min)."""
    n = len(betas)
    g = sign * values
    i = int(np.argmax(g))
    if not (g[i] > g[(i - 1) % n] and g[i] > g[(i + 1) % n]):
        return values[i]

    def neg_g(beta):
        eps = _to_frame(bloch_eigenphases(spec, planck, [beta], validate=False)[0], cut)
        return -sign * np.sort(eps)[j]

    h = betas[1] - betas[0]
    try:
        res = minimize_scalar(neg_g, bracket=(betas[i] - h, betas[i], betas[i] + h),
                              method="golden", options={"xtol": 1e-10})
    except (ValueError, RuntimeError):
        return values[i]
    return sign * max(g[i], -res.fun)


def band_structure(spec, planck, n_beta=DEFAULT_N_BETA, refine=True, merge_tol=1e-12):
    """Diagonalize the Bloch operator over a uniform beta grid and assemble bands."""
    if n_beta < 2:
        raise ParameterError("n_beta must be >= 2")
    spec = _require_rational(spec, planck)
    period = kinetic_period(spec, planck)
    betas = TWO_PI * np.arange(n_beta) / n_beta
    eps = bloch_eigenphases(spec, planck, betas)
    cut = _largest_gap_cut(eps.ravel())
    framed = np.sort(_to_frame(eps, cut), axis=1)
    lo = framed.min(axis=0)
    hi = framed.max(axis=0)
    if refine:
        for j in range(period):
            width = hi[j] - lo[j]
            # numerically flat branches carry no extremum to polish
            if 1e-11 < width < REFINE_BELOW:
                hi[j] = max(hi[j], _refine(spec, planck, cut, j, betas, framed[:, j], +1))
                lo[j] = min(lo[j], _refine(spec, planck, cut, j, betas, framed[:, j], -1))
    bands = []
    for a, b in _merge(list(zip(lo, hi)), merge_tol):
        start = _wrap(a)
        bands.append((start, start + (b - a), b - a))
    bands.sort()
    return BandSpectrum(
        planck=planck,
        period=period,
        bloch_angles=betas,
        eigenphases=np.sort(_wrap(framed), axis=1),
        bands=bands,
        branch_ranges=np.column_stack([lo, hi]),
    )


def max_bandwidth(bs):
    if not bs.bands:
        raise ParameterError("band spectrum has no bands")
    return max(width for _, _, width in bs.bands)


def directed_hausdorff_circle(s1, s2):
    """max over x in s1 of the circular distance to the nearest point of s2."""
    x = np.mod(np.asarray(s1, dtype=float).ravel(), TWO_PI)
    y = np.sort(np.mod(np.asarray(s2, dtype=float).ravel(), TWO_PI))
    ext = np.concatenate([y[-1:] - TWO_PI, y, y[:1] + TWO_PI])
    idx = np.searchsorted(ext, x)
    d = np.minimum(np.abs(x - ext[idx - 1]), np.abs(ext[idx] - x))
    return float(d.max())


def compare_spectra(s1, s2):
    """Symmetric Hausdorff distance between two eigenphase sets on the circle."""
    if np.size(s1) == 0 or np.size(s2) == 0:
        raise ParameterError("cannot compare an empty spectrum")
    return max(directed_hausdorff_circle(s1, s2), directed_hausdorff_circle(s2, s1))


class RatioFamily:
    """Maps a rational Planck constant to a map spec with fixed strength ratios.

    variant "khm": ratios (K/hbar, L/hbar); "dkrm": (k1, k2) = Kt_i / hbar_tilde.
    """

    def __init__(self, variant, r1, r2):
        if variant not in ("khm", "dkrm"):
            raise ParameterError(f"unknown family variant {variant!r}")
        self.variant, self.r1, self.r2 = variant, r1, r2

    def __call__(self, planck):
        h = planck.value
        if self.variant == "khm":
            return KHM.from_ratios(self.r1, self.r2, h)
        return DKRMResonant(hbar_tilde=h, k1=self.r1, k2=self.r2)

    def __repr__(self):
        return f"RatioFamily({self.variant!r}, {self.r1!r}, {self.r2!r})"


def _butterfly_rows(args):
    family, planck, n_beta = args
    spec = family(planck)
    betas = TWO_PI * np.arange(n_beta) / n_beta
    eps = np.sort(bloch_eigenphases(spec, planck, betas), axis=1)
    rows = []
    for i, beta in enumerate(betas):
        for j, e in enumerate(eps[i]):
            rows.append((planck.a, planck.b, planck.value, beta, j, e))
    return rows


def worker_count():
    try:
        return max(1, int(os.environ.get("KICKMAPS_WORKERS", "1")))
    except ValueError:
        return 1


def butterfly(family, rationals, n_beta=DEFAULT_N_BETA, workers=None):
    """Rows (a, b, hbar, beta, band_index, epsilon) for every rational, in input order."""
    workers = worker_count() if workers is None else workers
    jobs = [(family, p, n_beta) for p in rationals]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_butterfly_rows, jobs))
    else:
        chunks = [_butterfly_rows(job) for job in jobs]
    return [row for chunk in chunks for row in chunk]


def spectrum_points(spec, planck, n_beta=DEFAULT_N_BETA):
    """All eigenphases over the beta grid, flattened."""
    betas = TWO_PI * np.arange(n_beta) / n_beta
    return bloch_eigenphases(spec, planck, betas).ravel()
