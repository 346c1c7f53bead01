"""Momentum-lattice states, the q <-> m transform, and observables.

A state holds amplitudes of |m> for m = m_min ... m_min + N - 1. The position
grid is q_j = 2 pi j / N, on which the transform is exactly unitary.
"""

from dataclasses import dataclass

import numpy as np
from scipy import fft

from .errors import ShapeError

EDGE_TOL = 1e-12
DEFAULT_N = 1024


@dataclass(frozen=True)
class LatticeState:
    m_min: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise ShapeError("a lattice state needs a 1-d array of at least 2 amplitudes")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "m_min", int(self.m_min))

    @property
    def N(self):
        return self.amplitudes.size

    @property
    def momenta(self):
        return np.arange(self.m_min, self.m_min + self.N)

    @property
    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def norm(self):
        return float(np.sum(self.probabilities))

    def same_window(self, other):
        return self.m_min == other.m_min and self.N == other.N

    def with_amplitudes(self, amplitudes):
        return LatticeState(self.m_min, amplitudes)


@dataclass(frozen=True)
class Observables:
    mean_m: float
    variance: float
    survival: float
    profile: tuple  # (momenta, P(m)) arrays


def centered_window(N=DEFAULT_N):
    """m_min for an N-site window centred on m = 0."""
    return -(N // 2)


def basis_state(m0, m_min=None, N=DEFAULT_N):
    """|m0> on the window [m_min, m_min + N)."""
    if m_min is None:
        m_min = centered_window(N)
    if N < 2:
        raise ShapeError("window needs N >= 2")
    if not m_min <= m0 < m_min + N:
        raise IndexError(f"m0={m0} outside window [{m_min}, {m_min + N})")
    amps = np.zeros(N, dtype=complex)
    amps[m0 - m_min] = 1.0
    return LatticeState(m_min, amps)


def position_grid(N):
    return 2.0 * np.pi * np.arange(N) / N


def to_position(state):
    """Amplitudes on q_j = 2 pi j / N, psi_j = N^{-1/2} sum_m a_m exp(i m q_j)."""
    q = position_grid(state.N)
    return np.exp(1j * state.m_min * q) * fft.ifft(state.amplitudes, norm="ortho")


def to_momentum(psi_q, m_min):
    """Inverse of :func:`to_position`."""
    psi_q = np.asarray(psi_q, dtype=complex)
    q = position_grid(psi_q.size)
    return LatticeState(m_min, fft.fft(psi_q * np.exp(-1j * m_min * q), norm="ortho"))


def edge_tail(probabilities):
    """Probability in the outermost 1% of sites (at least one) on each side."""
    p = np.asarray(probabilities)
    w = max(1, p.size // 100)
    return float(p[:w].sum() + p[-w:].sum())


def observables(state, reference):
    if not state.same_window(reference):
        raise ShapeError("state and reference live on different momentum windows")
    P = state.probabilities
    m = state.momenta.astype(float)
    total = P.sum()
    mean = float(np.dot(m, P) / total)
    variance = float(np.dot((m - mean) ** 2, P) / total)
    overlap = np.vdot(reference.amplitudes, state.amplitudes)
    return Observables(
        mean_m=mean,
        variance=max(variance, 0.0),
        survival=float(abs(overlap) ** 2),
        profile=(state.momenta, P / total),
    )
