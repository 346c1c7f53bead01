import math

import numpy as np
import pytest

from kickmaps import (
    KHM,
    DKRMResonant,
    NumericalError,
    ParameterError,
    WindowOverflowError,
    basis_state,
    dense_operator,
    diffusion_exponent,
    evolve,
    staircase_widths,
)
from kickmaps.core import LatticeState, observables
from kickmaps.dynamics import TimeSeries, evolve_from_basis, modal_width, snapshot_widths, step_edges


def synthetic_series(v):
    k = np.arange(len(v))
    return TimeSeries(kicks=k, variance=np.asarray(v, float), survival=np.ones(len(v)), mean=np.zeros(len(v)),
                      snapshots=[], m_min=0, N=2, final=None)


def test_zero_strength_evolution():
    s = evolve(basis_state(0, -16, 32), KHM(0, 0, 1.0), 20)
    assert np.all(np.asarray(s.variance) == 0)
    assert np.allclose(s.survival, 1.0)
    assert len(s.kicks) == len(s.variance) == len(s.survival) == 21


def test_initial_survival_is_one():
    s = evolve(basis_state(0, -256, 512), KHM.from_ratios(1, 1, 2.0), 5)
    assert s.survival[0] == 1.0 and s.kicks[0] == 0


def test_overflow_diagnostic():
    with pytest.raises(WindowOverflowError) as exc:
        evolve(basis_state(0, -32, 64), KHM.from_ratios(1, 1, 26 * math.pi / 41), 500)
    assert exc.value.kick >= 1 and exc.value.tail > 1e-12


def test_auto_doubling():
    s = evolve_from_basis(KHM.from_ratios(1, 1, 26 * math.pi / 41), 300, N=64)
    assert s.N > 64


def test_split_step_vs_dense_powers():
    spec = DKRMResonant(26 * math.pi / 41, 1.0, 1.0)
    m_min, N = -64, 128
    U = dense_operator(spec, m_min, N, boundary="periodic")
    v = basis_state(0, m_min, N).amplitudes.copy()
    series = evolve(basis_state(0, m_min, N), spec, 50)
    for _ in range(50):
        v = U @ v
    assert np.max(np.abs(series.final.amplitudes - v)) < 1e-8


def test_norm_over_many_kicks():
    s = evolve_from_basis(DKRMResonant(26 * math.pi / 41, 1.0, 1.0), 10_000, N=1024)
    assert abs(s.final.norm() - 1) < 1e-12


def test_exponent_synthetic():
    t = np.arange(200.0)
    alpha, r2 = diffusion_exponent(synthetic_series(3 * t**2), (10, 199))
    assert alpha == pytest.approx(2.0, abs=1e-12) and r2 == pytest.approx(1.0)
    alpha, _ = diffusion_exponent(synthetic_series(np.full(200, 5.0)), (10, 199))
    assert alpha == pytest.approx(0.0, abs=1e-12)


def test_exponent_errors():
    s = synthetic_series(np.arange(100.0))
    with pytest.raises(ParameterError):
        diffusion_exponent(s, (5, 50))
    with pytest.raises(ParameterError):
        diffusion_exponent(s, (20, 500))
    z = synthetic_series(np.zeros(100))
    with pytest.raises(NumericalError):
        diffusion_exponent(z, (10, 50))


def test_golden_convergent_exponent_recorded():
    hbar = 2 * math.pi * 13 / 34
    s = evolve_from_basis(KHM.from_ratios(1, 1, hbar), 1000, N=4096)
    alpha, r2 = diffusion_exponent(s, (200, 1000))
    assert np.isfinite(alpha) and 0 <= r2 <= 1


def test_snapshots_recorded():
    s = evolve(basis_state(0, -256, 512), KHM.from_ratios(1, 1, 2.0), 10, snapshot_at=(3, 10))
    assert [k for k, *_ in s.snapshots] == [3, 10]
    k, m, P = s.snapshots[0]
    assert abs(P.sum() - 1) < 1e-12


def _blocks(width, n_blocks, drop=1e3, start=1):
    m = np.arange(-5, start + width * n_blocks)
    P = np.empty(m.size)
    P[m < start] = 1.0
    for i in range(n_blocks):
        sel = (m >= start + i * width) & (m < start + (i + 1) * width)
        P[sel] = drop ** -(i + 1)
    return list(zip(m, P / P.sum()))


def test_staircase_geometric_no_steps():
    m = np.arange(-100, 101)
    P = 0.8 ** np.abs(m)
    assert staircase_widths(list(zip(m, P / P.sum())), 10) == []


def test_staircase_synthetic_blocks():
    widths = staircase_widths(_blocks(61, 5), 10)
    assert widths == [61] * 3
    assert modal_width(widths) == 61


def test_staircase_ignores_dip_inside_plateau():
    prof = _blocks(61, 4)
    m, P = map(np.array, zip(*prof))
    P[m == 30] *= 1e-3
    assert staircase_widths(list(zip(m, P)), 10) == [61] * 2


def test_staircase_errors():
    with pytest.raises(ParameterError):
        staircase_widths([(0, 1.0), (1, 0.0), (2, 0.0)], 10)
    with pytest.raises(ParameterError):
        staircase_widths(_blocks(5, 3), 0.5)


def test_modal_width():
    assert modal_width([]) is None
    assert modal_width([3, 3, 4]) is None
    assert modal_width([5, 5, 5, 7, 7, 7, 7]) == 7


def test_khm_shows_no_staircase():
    s = evolve_from_basis(KHM(3.7, 3.7, 2.0), 600, N=4096, snapshot_at=(300, 600))
    assert modal_width(snapshot_widths(s)) is None


def test_edges_on_tail_only():
    m = np.arange(-50, 51)
    P = np.where(m < -10, 1e-9, 1.0)
    assert step_edges((m, P / P.sum())) == []
