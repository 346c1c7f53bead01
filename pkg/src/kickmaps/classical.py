"""Classical limits: the resonant double-kicked rotor and the kicked Harper map.

Angles are reduced mod 2 pi after every sub-step; the momenta are never
reduced, since the frame change P = p + q needs them unreduced.
"""

from dataclasses import dataclass
import math

import numpy as np

from ._backend import kernels

TWO_PI = 2.0 * math.pi


def _mod(x):
    return x % TWO_PI


@dataclass(frozen=True)
class ClassicalState:
    q: float
    p_tilde: float

    def __post_init__(self):
        object.__setattr__(self, "q", _mod(float(self.q)))


@dataclass(frozen=True)
class HarperState:
    Q: float
    P_tilde: float

    def __post_init__(self):
        object.__setattr__(self, "Q", _mod(float(self.Q)))


def dkrm_classical_step(s, Kt1, Kt2):
    """Advance (q, p) from just before kick 2l to just before kick 2l + 2."""
    p = s.p_tilde + Kt2 * math.sin(s.q)
    q = _mod(s.q + p)
    p = p + Kt1 * math.sin(q)
    q = _mod(q - p)
    return ClassicalState(q, p)


def harper_classical_step(s, Kt1, Kt2):
    P = s.P_tilde + Kt2 * math.sin(s.Q)
    Q = _mod(s.Q - Kt1 * math.sin(P))
    return HarperState(Q, P)


def dkrm_classical_inverse(s, Kt1, Kt2):
    q1 = _mod(s.q + s.p_tilde)
    p1 = s.p_tilde - Kt1 * math.sin(q1)
    q0 = _mod(q1 - p1)
    return ClassicalState(q0, p1 - Kt2 * math.sin(q0))


def harper_classical_inverse(s, Kt1, Kt2):
    Q = _mod(s.Q + Kt1 * math.sin(s.P_tilde))
    return HarperState(Q, s.P_tilde - Kt2 * math.sin(Q))


def to_harper_frame(s):
    """(q, p) -> (Q, P) = (q, p + q)."""
    return HarperState(s.q, s.p_tilde + s.q)


def from_harper_frame(s):
    return ClassicalState(s.Q, s.P_tilde - s.Q)


_STEPS = {"dkrm": (dkrm_classical_step, ClassicalState), "harper": (harper_classical_step, HarperState)}


def trajectory(variant, initial, Kt1, Kt2, n_steps):
    """[initial, step(initial), ...] with n_steps + 1 states."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if variant not in _STEPS:
        raise ValueError(f"unknown variant {variant!r}")
    orbit_fn = kernels.dkrm_orbits if variant == "dkrm" else kernels.harper_orbits
    cls = _STEPS[variant][1]
    a, b = (initial.q, initial.p_tilde) if variant == "dkrm" else (initial.Q, initial.P_tilde)
    xs, ys = orbit_fn(np.array([a]), np.array([b]), Kt1, Kt2, n_steps)
    return [cls(x, y) for x, y in zip(xs[:, 0], ys[:, 0])]


def orbits(variant, x0, y0, Kt1, Kt2, n_steps):
    """Vectorized ensembles: arrays of shape (n_steps + 1, n_seeds) for both coordinates."""
    orbit_fn = kernels.dkrm_orbits if variant == "dkrm" else kernels.harper_orbits
    return orbit_fn(np.asarray(x0, float), np.asarray(y0, float), float(Kt1), float(Kt2), int(n_steps))


def circular_difference(a, b):
    """|a - b| folded onto [0, pi]."""
    d = np.mod(np.asarray(a) - np.asarray(b), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def conjugacy_defects(q0, p0, Kt1, Kt2, n_steps):
    """Per-step mismatch between frame(dkrm_step(s)) and harper_step(frame(s))
    along DKRM orbits; shape (n_steps, n_seeds).

    Both Q and P are compared modulo 2 pi: reducing q shifts P = p + q by whole
    turns, which the Harper map ignores (it depends on P only through sin P).
    """
    qs, ps = orbits("dkrm", q0, p0, Kt1, Kt2, n_steps)
    Q, P = qs[:-1], ps[:-1] + qs[:-1]
    P_next = P + Kt2 * np.sin(Q)
    Q_next = np.mod(Q - Kt1 * np.sin(P_next), TWO_PI)
    dq = circular_difference(qs[1:], Q_next)
    dp = circular_difference(ps[1:] + qs[1:], P_next)
    return np.maximum(dq, dp)


def free_running_difference(q0, p0, Kt1, Kt2, n_steps):
    """Max over steps of the gap between the framed DKRM orbit and an independently
    iterated Harper orbit from the framed seed (sensitive to chaos)."""
    qs, ps = orbits("dkrm", q0, p0, Kt1, Kt2, n_steps)
    Qs, Ps = orbits("harper", qs[0], ps[0] + qs[0], Kt1, Kt2, n_steps)
    d = np.maximum(circular_difference(qs, Qs), circular_difference(ps + qs, Ps))
    return d.max(axis=0)


def jacobian_determinant(s, Kt1, Kt2, h=1e-6):
    """det of the central-difference Jacobian of one dkrm_classical_step.

    Increments are propagated directly (sin a - sin b as a product) so the
    difference quotient does not cancel against the base point.
    """
    q0, p0 = s.q, s.p_tilde
    p1 = p0 + Kt2 * math.sin(q0)
    q1 = q0 + p1

    def dsin(x, d):
        return 2.0 * math.cos(x + 0.5 * d) * math.sin(0.5 * d)

    def delta(dq, dp):
        dp1 = dp + Kt2 * dsin(q0, dq)
        dq1 = dq + dp1
        dp2 = dp1 + Kt1 * dsin(q1, dq1)
        return np.array([dq1 - dp2, dp2])

    J = np.empty((2, 2))
    J[:, 0] = (delta(h, 0.0) - delta(-h, 0.0)) / (2 * h)
    J[:, 1] = (delta(0.0, h) - delta(0.0, -h)) / (2 * h)
    return float(np.linalg.det(J))
