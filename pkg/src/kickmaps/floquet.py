"""One-period quantum maps and their momentum-basis matrices.

Operator products are written left to right and act right to left, so the
rightmost factor is applied first. Every factor multiplies by exp(-i * phase)
unless its sign says otherwise.

    KHM             U = exp(-i (L/hbar) cos p) exp(-i (K/hbar) cos q)
    DKRM resonant   U = exp(+i hbar_t m^2/2) exp(-i k2 cos q) exp(-i hbar_t m^2/2) exp(-i k1 cos q)
    DKRM general    U = free(T - eta) exp(-i K2/hbar cos q) free(eta) exp(-i K1/hbar cos q)

with free(tau) = exp(-i tau hbar m^2 / 2) and hbar_t = eta * hbar.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np
from scipy import fft

from .core import LatticeState, edge_tail, position_grid, to_momentum, to_position, EDGE_TOL
from .errors import ParameterError, WindowOverflowError
from .special import kick_element

FOUR_PI = 4.0 * math.pi
RESONANCE_TOL = 1e-12


def _check_strength(name, value):
    if not math.isfinite(value) or value < 0:
        raise ParameterError(f"{name} must be finite and non-negative, got {value}")


def _check_positive(name, value):
    if not math.isfinite(value) or value <= 0:
        raise ParameterError(f"{name} must be finite and positive, got {value}")


@dataclass(frozen=True)
class KHM:
    """Kicked Harper map with kick strengths K, L and Planck constant hbar."""

    K: float
    L: float
    hbar: float

    def __post_init__(self):
        _check_strength("K", self.K)
        _check_strength("L", self.L)
        _check_positive("hbar", self.hbar)

    @classmethod
    def from_ratios(cls, k, l, hbar):
        return cls(K=k * hbar, L=l * hbar, hbar=hbar)

    @property
    def k(self):
        return self.K / self.hbar

    @property
    def l(self):
        return self.L / self.hbar

    @property
    def planck(self):
        return self.hbar


@dataclass(frozen=True)
class DKRMResonant:
    """Double-kicked rotor reduced on the resonance T hbar = 4 pi.

    ``k1``, ``k2`` are the reduced strengths Kt_i / hbar_tilde (= K_i / hbar).
    """

    hbar_tilde: float
    k1: float
    k2: float

    def __post_init__(self):
        _check_positive("hbar_tilde", self.hbar_tilde)
        _check_strength("k1", self.k1)
        _check_strength("k2", self.k2)

    @classmethod
    def from_scaled(cls, Kt1, Kt2, hbar_tilde):
        """Build from the rescaled strengths Kt_i = eta K_i."""
        return cls(hbar_tilde=hbar_tilde, k1=Kt1 / hbar_tilde, k2=Kt2 / hbar_tilde)

    @classmethod
    def from_general(cls, general):
        resid = abs(general.T * general.hbar - FOUR_PI)
        if resid >= RESONANCE_TOL:
            raise ParameterError(f"T*hbar - 4pi = {resid:.3e}; not on the quantum resonance")
        return cls(
            hbar_tilde=general.eta * general.hbar,
            k1=general.K1 / general.hbar,
            k2=general.K2 / general.hbar,
        )

    @property
    def Kt1(self):
        return self.k1 * self.hbar_tilde

    @property
    def Kt2(self):
        return self.k2 * self.hbar_tilde

    @property
    def planck(self):
        return self.hbar_tilde


@dataclass(frozen=True)
class DKRMGeneral:
    """Double-kicked rotor: kicks K1 at t = nT and K2 at t = nT + eta."""

    K1: float
    K2: float
    hbar: float
    T: float
    eta: float

    def __post_init__(self):
        _check_strength("K1", self.K1)
        _check_strength("K2", self.K2)
        _check_positive("hbar", self.hbar)
        _check_positive("T", self.T)
        if not 0 < self.eta < self.T:
            raise ParameterError(f"need 0 < eta < T, got eta={self.eta}, T={self.T}")

    @property
    def on_resonance(self):
        return abs(self.T * self.hbar - FOUR_PI) < RESONANCE_TOL

    def reduced(self):
        return DKRMResonant.from_general(self)

    @property
    def planck(self):
        return self.hbar


MapSpec = KHM | DKRMResonant | DKRMGeneral


def _turns(x, max_den=10**6):
    """x as an exact Fraction when it agrees with one to rounding, else None."""
    frac = Fraction(x).limit_denominator(max_den)
    if abs(float(frac) - x) <= 4e-16 * max(1.0, abs(x)):
        return frac
    return None


def quadratic_phase(m, scale):
    """scale * m^2 / 2, reduced mod 2 pi.

    Rational scale / 2pi = a/b is reduced in integer arithmetic so that large
    |m| do not lose the phase to rounding.
    """
    m = np.asarray(m, dtype=np.int64)
    frac = _turns(scale / (2.0 * math.pi))
    if frac is None:
        return np.mod(scale * m.astype(float) ** 2 / 2.0, 2.0 * math.pi)
    a, b = frac.numerator, frac.denominator
    # pi a m^2 / b  ->  pi * (a m^2 mod 2b) / b
    r = np.mod(np.mod(m * m, 2 * b) * a, 2 * b)
    return math.pi * r.astype(float) / b


def harper_kinetic_angle(m, hbar):
    """m * hbar reduced mod 2 pi (exact for rational hbar / 2pi)."""
    m = np.asarray(m, dtype=np.int64)
    frac = _turns(hbar / (2.0 * math.pi))
    if frac is None:
        return np.mod(hbar * m.astype(float), 2.0 * math.pi)
    a, b = frac.numerator, frac.denominator
    return 2.0 * math.pi * np.mod(m * a, b).astype(float) / b


def _cis(angle, dtype):
    """exp(i angle) evaluated in the real precision matching ``dtype``."""
    real = np.longdouble if np.dtype(dtype) == np.clongdouble else np.float64
    angle = np.asarray(angle).astype(real)
    return (np.cos(angle) + 1j * np.sin(angle)).astype(dtype)


class Propagator:
    """Precomputed phase tables for repeated application of one map on one window.

    ``dtype=np.clongdouble`` runs the FFTs in extended precision, which keeps
    the rounding drift of the norm near 1e-19 per kick instead of 1e-16.
    """

    def __init__(self, spec, m_min, N, dtype=np.complex128):
        self.spec = spec
        self.m_min = int(m_min)
        self.N = int(N)
        self.dtype = np.dtype(dtype)
        real = np.longdouble if self.dtype == np.clongdouble else np.float64
        m = np.arange(self.m_min, self.m_min + self.N)
        cosq = np.cos(2 * real(math.pi) * np.arange(self.N, dtype=real) / self.N)
        if isinstance(spec, KHM):
            kin = spec.l * np.cos(harper_kinetic_angle(m, spec.hbar).astype(real))
            self._kinetic = _cis(-kin, dtype)
            self._kick = _cis(-spec.k * cosq, dtype)
        elif isinstance(spec, DKRMResonant):
            self._dplus = _cis(quadratic_phase(m, spec.hbar_tilde), dtype)
            self._kick1 = _cis(-spec.k1 * cosq, dtype)
            self._kick2 = _cis(-spec.k2 * cosq, dtype)
        elif isinstance(spec, DKRMGeneral):
            self._free_eta = _cis(-quadratic_phase(m, spec.eta * spec.hbar), dtype)
            self._free_rest = _cis(-quadratic_phase(m, (spec.T - spec.eta) * spec.hbar), dtype)
            self._kick1 = _cis(-(spec.K1 / spec.hbar) * cosq, dtype)
            self._kick2 = _cis(-(spec.K2 / spec.hbar) * cosq, dtype)
        else:
            raise ParameterError(f"unknown map spec {spec!r}")

    @staticmethod
    def _kick_raw(amps, phases):
        # the exp(i m_min q) factors of the transform cancel around a diagonal in q
        return fft.fft(fft.ifft(amps, norm="ortho") * phases, norm="ortho")

    def advance(self, amps):
        """One period on a raw amplitude array; returns a new array."""
        spec = self.spec
        if isinstance(spec, KHM):
            return self._kinetic * self._kick_raw(amps, self._kick)
        if isinstance(spec, DKRMResonant):
            psi = self._kick_raw(amps, self._kick1)
            psi = self._dplus.conj() * psi
            psi = self._kick_raw(psi, self._kick2)
            return self._dplus * psi
        psi = self._kick_raw(amps, self._kick1)
        psi = self._free_eta * psi
        psi = self._kick_raw(psi, self._kick2)
        return self._free_rest * psi


def apply_kick(state, c):
    """exp(-i c cos q) applied on the position grid."""
    psi = to_position(state)
    q = position_grid(state.N)
    return to_momentum(psi * np.exp(-1j * c * np.cos(q)), state.m_min)


def apply_kinetic_khm(state, L_over_hbar, hbar):
    angle = harper_kinetic_angle(state.momenta, hbar)
    return state.with_amplitudes(np.exp(-1j * L_over_hbar * np.cos(angle)) * state.amplitudes)


def apply_kinetic_quadratic(state, sign, hbar_tilde):
    """Multiply by exp(sign * i * hbar_tilde * m^2 / 2)."""
    if sign not in (1, -1):
        raise ParameterError("sign must be +1 or -1")
    phase = quadratic_phase(state.momenta, hbar_tilde)
    return state.with_amplitudes(np.exp(sign * 1j * phase) * state.amplitudes)


def step(state, spec, check_edges=True):
    """One full period of ``spec`` applied to ``state``."""
    amps = Propagator(spec, state.m_min, state.N).advance(state.amplitudes)
    if check_edges:
        tail = edge_tail(np.abs(amps) ** 2)
        if tail > EDGE_TOL:
            raise WindowOverflowError(1, tail, state.N)
    return LatticeState(state.m_min, amps)


def kick_matrix(c, m_min, N, boundary="open"):
    """Jacobi-Anger matrix of exp(-i c cos q) on the window.

    ``open`` truncates the infinite Toeplitz matrix; ``periodic`` folds the
    couplings modulo N, i.e. the kick on a ring of N momentum sites.
    """
    idx = np.arange(N)
    diff = idx[:, None] - idx[None, :]
    if boundary == "open":
        table = kick_element(np.arange(-(N - 1), N), c)
        return table[diff + N - 1]
    if boundary == "periodic":
        reach = int(abs(c) + 40 + 4 * math.sqrt(abs(c) + 1))
        wraps = reach // N + 1
        d = np.arange(N)
        folded = np.zeros(N, dtype=complex)
        for s in range(-wraps, wraps + 1):
            folded += kick_element(d + s * N, c)
        return folded[np.mod(diff, N)]
    raise ParameterError(f"unknown boundary {boundary!r}")


def dense_operator(spec, m_min, N, boundary="open"):
    """<m'|U|m> for the window, built from Jacobi-Anger kicks and diagonal phases."""
    if N < 2:
        raise ParameterError("dense operator needs N >= 2")
    m = np.arange(m_min, m_min + N)
    if isinstance(spec, KHM):
        kin = np.exp(-1j * spec.l * np.cos(harper_kinetic_angle(m, spec.hbar)))
        return kin[:, None] * kick_matrix(spec.k, m_min, N, boundary)
    if isinstance(spec, DKRMResonant):
        dplus = np.exp(1j * quadratic_phase(m, spec.hbar_tilde))
        K1 = kick_matrix(spec.k1, m_min, N, boundary)
        K2 = kick_matrix(spec.k2, m_min, N, boundary)
        return (dplus[:, None] * K2 * dplus.conj()[None, :]) @ K1
    if isinstance(spec, DKRMGeneral):
        f_eta = np.exp(-1j * quadratic_phase(m, spec.eta * spec.hbar))
        f_rest = np.exp(-1j * quadratic_phase(m, (spec.T - spec.eta) * spec.hbar))
        K1 = kick_matrix(spec.K1 / spec.hbar, m_min, N, boundary)
        K2 = kick_matrix(spec.K2 / spec.hbar, m_min, N, boundary)
        return (f_rest[:, None] * K2 * f_eta[None, :]) @ K1
    raise ParameterError(f"unknown map spec {spec!r}")


def shifted_kick_element(m_prime, m, c, hbar_tilde):
    """<m'| exp(-i c cos(q + p_tilde)) |m>, the kick conjugated by the kinetic phase.

    Equals exp(i hbar_t (m'^2 - m^2)/2) (-i)^(m'-m) J_(m'-m)(c).
    """
    m_prime = np.asarray(m_prime, dtype=np.int64)
    m = np.asarray(m, dtype=np.int64)
    phase = quadratic_phase(m_prime, hbar_tilde) - quadratic_phase(m, hbar_tilde)
    out = np.exp(1j * phase) * kick_element(m_prime - m, c)
    return out[()] if out.ndim == 0 else out
