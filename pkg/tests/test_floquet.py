import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kickmaps import (
    KHM,
    DKRMGeneral,
    DKRMResonant,
    ParameterError,
    WindowOverflowError,
    apply_kick,
    apply_kinetic_khm,
    apply_kinetic_quadratic,
    basis_state,
    dense_operator,
    shifted_kick_element,
    step,
)
from kickmaps.core import LatticeState
from kickmaps.floquet import kick_matrix, quadratic_phase

H0 = 26 * math.pi / 41


def jacobi_anger_column(c, m, m0=0):
    return np.array([complex((-1j) ** int(d)) * float(mpmath.besselj(int(d), c)) for d in m - m0])


def test_kick_zero_is_identity(rng):
    a = rng.normal(size=32) + 1j * rng.normal(size=32)
    s = LatticeState(-16, a / np.linalg.norm(a))
    assert np.max(np.abs(apply_kick(s, 0.0).amplitudes - s.amplitudes)) < 1e-15


def test_kick_diagonal_element():
    out = apply_kick(basis_state(0, -32, 64), 1.0)
    assert out.amplitudes[32] == pytest.approx(0.7651976865579666, abs=1e-12)


@pytest.mark.parametrize("c", [1.0, 3.7, 14.4])
def test_kick_column_matches_jacobi_anger(c):
    s = basis_state(0, -64, 128)
    out = apply_kick(s, c)
    want = jacobi_anger_column(c, s.momenta)
    assert np.max(np.abs(out.amplitudes - want)) < 1e-10


def test_kinetic_khm_zero_strength(rng):
    s = LatticeState(-8, np.ones(16) / 4)
    assert np.array_equal(apply_kinetic_khm(s, 0.0, 2.0).amplitudes, s.amplitudes)


def test_kinetic_khm_four_pi_is_global_phase():
    s = LatticeState(-50, np.ones(100) / 10)
    out = apply_kinetic_khm(s, 0.7, 4 * math.pi).amplitudes
    assert np.allclose(out, np.exp(-0.7j) * s.amplitudes, atol=1e-14)


def test_kinetic_khm_direct_value():
    out = apply_kinetic_khm(basis_state(1, -4, 8), 0.9, 2 * math.pi / 3)
    assert out.amplitudes[5] == pytest.approx(np.exp(0.45j), abs=1e-14)


def test_quadratic_four_pi_identity():
    s = LatticeState(-500, np.ones(1000) / math.sqrt(1000))
    out = apply_kinetic_quadratic(s, 1, 4 * math.pi)
    assert np.max(np.abs(out.amplitudes - s.amplitudes)) < 1e-14


def test_quadratic_direct_value():
    out = apply_kinetic_quadratic(basis_state(3, -8, 16), 1, 2 * math.pi * 13 / 41)
    assert out.amplitudes[11] == pytest.approx(np.exp(1j * math.pi * 13 * 9 / 41), abs=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 12.0), st.integers(0, 2**32 - 1))
def test_quadratic_inverse_pair(ht, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=64) + 1j * rng.normal(size=64)
    s = LatticeState(-32, a / np.linalg.norm(a))
    back = apply_kinetic_quadratic(apply_kinetic_quadratic(s, 1, ht), -1, ht)
    assert np.max(np.abs(back.amplitudes - s.amplitudes)) < 1e-14


def test_quadratic_phase_exact_for_large_m():
    m = np.array([10**6 + 7])
    frac_turns = (13 * (10**6 + 7) ** 2) % 82
    assert quadratic_phase(m, 2 * math.pi * 13 / 41)[0] == pytest.approx(math.pi * frac_turns / 41, abs=1e-12)


def test_bad_sign():
    with pytest.raises(ParameterError):
        apply_kinetic_quadratic(basis_state(0, -2, 4), 2, 1.0)


def test_resonance_reduction_from_zero():
    T, hbar = 2.0, 2 * math.pi
    gen = DKRMGeneral(K1=1.3, K2=0.7, hbar=hbar, T=T, eta=H0 / hbar)
    res = DKRMResonant(H0, 1.3 / hbar, 0.7 / hbar)
    s = basis_state(0, -128, 256)
    assert np.max(np.abs(step(s, gen).amplitudes - step(s, res).amplitudes)) < 1e-12
    red = gen.reduced()
    assert red.k1 == pytest.approx(1.3 / hbar) and red.hbar_tilde == pytest.approx(H0)


def test_resonant_requires_resonance():
    with pytest.raises(ParameterError):
        DKRMResonant.from_general(DKRMGeneral(1, 1, 2.0, 2.0, 0.5))


def test_four_pi_double_kick_is_single_kick():
    s = basis_state(0, -64, 128)
    a = step(s, DKRMResonant(4 * math.pi, 0.8, 0.8))
    b = apply_kick(s, 1.6)
    assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-13


@pytest.mark.parametrize("spec", [KHM(0, 0, 2.0), DKRMResonant(H0, 0, 0), DKRMGeneral(0, 0, 1.0, 4 * math.pi, 2.0)])
def test_zero_strength_step(spec):
    s = basis_state(3, -16, 32)
    assert np.max(np.abs(step(s, spec).amplitudes - s.amplitudes)) < 1e-14


def test_negative_strength_rejected():
    with pytest.raises(ParameterError):
        KHM(-1, 1, 1)
    with pytest.raises(ParameterError):
        DKRMGeneral(1, 1, 1.0, 2.0, 3.0)


SPECS = [
    KHM.from_ratios(1.0, 1.0, 2.0),
    KHM.from_ratios(1.0, 1.0, H0),
    DKRMResonant(H0, 1.0, 1.0),
    DKRMResonant.from_scaled(3.7, 3.7, 2.0),
    DKRMGeneral(1.0, 2.0, 1.1, 3.0, 1.2),
]


@pytest.mark.parametrize("spec", SPECS)
def test_zero_strength_dense_and_unitarity(spec):
    U = dense_operator(spec, -256, 512)
    inner = slice(51, 461)
    err = np.abs((U.conj().T @ U)[inner, inner] - np.eye(512)[inner, inner]).max()
    assert err < 1e-8


@pytest.mark.parametrize("spec", SPECS)
def test_dense_column_matches_step(spec):
    m_min, N = -128, 256
    U = dense_operator(spec, m_min, N)
    for m0 in (-20, 0, 7):
        col = step(basis_state(m0, m_min, N), spec).amplitudes
        assert np.max(np.abs(U[:, m0 - m_min] - col)) < 1e-10


def test_dense_identity_at_zero_strength():
    assert np.allclose(dense_operator(KHM(0, 0, 1.0), -4, 8), np.eye(8))


@pytest.mark.parametrize("spec", SPECS)
def test_step_norm(spec, rng):
    a = np.zeros(1024, complex)
    a[480:544] = rng.normal(size=64) + 1j * rng.normal(size=64)
    s = LatticeState(-512, a / np.linalg.norm(a))
    out = step(s, spec)
    assert abs(out.norm() - 1) < 1e-13


def test_step_overflow():
    with pytest.raises(WindowOverflowError) as exc:
        step(basis_state(0, -4, 8), KHM.from_ratios(3.0, 3.0, 2.0))
    assert exc.value.n_sites == 8


def test_shifted_kick_element_values():
    assert shifted_kick_element(2, 2, 0.0, 1.0) == 1
    assert shifted_kick_element(2, 3, 0.0, 1.0) == 0
    want = np.exp(1j * math.pi * 13 / 41) * (-1j) * float(mpmath.besselj(1, 1.0))
    assert shifted_kick_element(1, 0, 1.0, 2 * math.pi * 13 / 41) == pytest.approx(want, abs=1e-15)


def test_shifted_kick_conjugation_identity():
    ht, c, m_min, N = H0, 1.7, -40, 80
    m = np.arange(m_min, m_min + N)
    S = shifted_kick_element(m[:, None], m[None, :], c, ht)
    D = np.diag(np.exp(1j * ht * m**2 / 2))
    assert np.max(np.abs(S - D @ kick_matrix(c, m_min, N) @ D.conj().T)) < 1e-12


def test_reduced_map_equals_shifted_form():
    spec = DKRMResonant(H0, 1.0, 1.3)
    m_min, N = -100, 200
    m = np.arange(m_min, m_min + N)
    shifted = shifted_kick_element(m[:, None], m[None, :], spec.k2, spec.hbar_tilde)
    other = shifted @ kick_matrix(spec.k1, m_min, N)
    assert np.max(np.abs(dense_operator(spec, m_min, N) - other)) < 1e-12
