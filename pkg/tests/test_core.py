import numpy as np
import pytest

from kickmaps import KHM, ShapeError, basis_state, observables, to_momentum, to_position
from kickmaps.core import LatticeState, edge_tail, position_grid
from kickmaps.floquet import dense_operator, step


def test_basis_state_centered():
    s = basis_state(0, -512, 1024)
    assert s.N == 1024 and s.probabilities[512] == 1.0 and s.norm() == 1.0


def test_basis_state_offset_window():
    s = basis_state(5, 0, 8)
    obs = observables(s, s)
    assert s.probabilities[5] == 1.0
    assert obs.mean_m == 5 and obs.variance == 0


def test_basis_state_out_of_window():
    with pytest.raises(IndexError):
        basis_state(0, 1, 4)


def test_window_too_small():
    with pytest.raises(ShapeError):
        basis_state(0, 0, 1)


def test_amplitudes_read_only():
    s = basis_state(0, -4, 8)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1


def test_delta_transforms_flat():
    psi = to_position(basis_state(0, -8, 16))
    assert np.allclose(np.abs(psi), 1 / 4, atol=1e-15)


def test_round_trip(rng):
    a = rng.normal(size=64) + 1j * rng.normal(size=64)
    s = LatticeState(-30, a / np.linalg.norm(a))
    back = to_momentum(to_position(s), s.m_min)
    assert np.max(np.abs(back.amplitudes - s.amplitudes)) < 1e-12
    assert abs(np.linalg.norm(to_position(s)) - 1) < 1e-12


def test_two_plane_waves():
    N = 32
    s = LatticeState(-16, np.where(np.isin(np.arange(-16, 16), [0, 1]), 2 ** -0.5, 0))
    q = position_grid(N)
    assert np.allclose(np.abs(to_position(s)) ** 2, (1 + np.cos(q)) / N, atol=1e-14)


def test_observables_symmetric_pair():
    amps = np.zeros(8, complex)
    amps[[3, 5]] = 2 ** -0.5
    s = LatticeState(-4, amps)
    obs = observables(s, basis_state(0, -4, 8))
    assert obs.variance == pytest.approx(1.0, abs=1e-15)
    assert obs.survival == 0.0 and obs.mean_m == 0.0
    m, P = obs.profile
    assert abs(P.sum() - 1) < 1e-10


def test_observables_mismatched_windows():
    with pytest.raises(ShapeError):
        observables(basis_state(0, -4, 8), basis_state(0, -8, 16))


def test_variance_against_dense_evolution():
    spec = KHM.from_ratios(1.0, 1.0, 2.0)
    N, m_min = 256, -128
    s = basis_state(0, m_min, N)
    U = dense_operator(spec, m_min, N, boundary="periodic")
    v = s.amplitudes.copy()
    for _ in range(10):
        s = step(s, spec)
        v = U @ v
    ref = basis_state(0, m_min, N)
    oracle = observables(LatticeState(m_min, v), ref)
    assert abs(observables(s, ref).variance - oracle.variance) < 1e-8


def test_parseval_observables(rng):
    a = rng.normal(size=128) + 1j * rng.normal(size=128)
    s = LatticeState(-64, a / np.linalg.norm(a))
    back = to_momentum(to_position(s), -64)
    o1, o2 = observables(s, s), observables(back, s)
    assert abs(o1.variance - o2.variance) < 1e-10
    assert abs(o1.mean_m - o2.mean_m) < 1e-10


def test_edge_tail():
    p = np.zeros(300)
    p[[0, 1, 2, 297]] = 0.25
    assert edge_tail(p) == pytest.approx(1.0)
    p2 = np.zeros(300)
    p2[3] = 1.0
    assert edge_tail(p2) == 0.0
