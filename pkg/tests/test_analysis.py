from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from dtckit.analysis import (CrystallineFraction, crystalline_fraction, disorder_average,
                             dtc_lifetime, fraction_error, noise_floor, spectrum, stft_peak,
                             target_bins)
from dtckit.fitting import double_exponential


def naive_dft(P, window):
    n0, n1 = window
    n = np.arange(n0 + 1, n1 + 1)
    N = n1 - n0
    k = np.arange(N)
    return np.exp(2j * np.pi * np.outer(k, n) / N) @ P[n]


@pytest.mark.parametrize("window", [(-1, 30), (4, 24), (10, 30), (5, 8)])
def test_matches_direct_sum(window):
    P = np.random.default_rng(0).normal(size=31)
    assert spectrum(P, window).amplitudes == pytest.approx(naive_dft(P, window), abs=1e-10)


def test_alternating_trace():
    P = (-1.0) ** np.arange(101)
    sp_ = spectrum(P, (50, 100))
    assert sp_.power[25] == pytest.approx(2500.0, rel=1e-12)
    assert crystalline_fraction(sp_).f == pytest.approx(1.0, abs=1e-12)


def test_constant_trace():
    sp_ = spectrum(np.ones(101), (50, 100))
    assert sp_.power[25] == pytest.approx(0.0, abs=1e-18)
    assert sp_.power[0] == pytest.approx(2500.0)
    assert crystalline_fraction(sp_).f == pytest.approx(0.0, abs=1e-15)


def test_rotation_peak_bins():
    P = np.cos(2 * np.pi * 0.517 * np.arange(101))
    sp_ = spectrum(P, (50, 100))
    assert set(np.argsort(sp_.power)[-2:]) == {26, 24}


def test_period_three():
    P = np.tile([1.0, -1.0, 0.0], 20)[:49]
    sp_ = spectrum(P, (0, 48))
    fc = crystalline_fraction(sp_, target_nu=Fraction(1, 3))
    assert target_bins(48, "1/3") == [16, 32]
    assert fc.f == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 60), st.integers(0, 9))
def test_parseval(N, start):
    P = np.random.default_rng(N * 31 + start).uniform(-1, 1, start + N + 3)
    s = spectrum(P, (start, start + N))
    x = P[start + 1:start + N + 1]
    assert s.total_power == pytest.approx(N * np.sum(x**2), rel=1e-9)
    # real input: S(k) and S(N - k) are conjugates
    assert s.amplitudes[1:] == pytest.approx(np.conj(s.amplitudes[1:][::-1]), abs=1e-9)


def test_sign_and_shift_invariance():
    P = np.random.default_rng(3).normal(size=60)
    a = crystalline_fraction(spectrum(P, (10, 50)))
    b = crystalline_fraction(spectrum(-P, (10, 50)))
    assert a.f == pytest.approx(b.f, rel=1e-12)
    # shifting the window by two cycles multiplies S(1/2) by a unit phase
    q = np.r_[0.0, 0.0, P]
    c = crystalline_fraction(spectrum(q, (12, 52)))
    assert a.f == pytest.approx(c.f, rel=1e-12)


def test_default_window():
    P = np.random.default_rng(1).normal(size=10)
    s = spectrum(P)
    assert s.N == 10 and s.window == (-1, 9)


@pytest.mark.parametrize("window", [(5, 5), (7, 3), (-2, 5), (0, 40), (3, 4)])
def test_window_errors(window):
    with pytest.raises(ValueError):
        spectrum(np.ones(31), window)


def test_target_errors():
    with pytest.raises(ValueError):
        target_bins(51, 0.5)
    with pytest.raises(ValueError):
        target_bins(50, "1/3")
    with pytest.raises(ValueError):
        target_bins(48, 0.25)
    with pytest.raises(ValueError):
        crystalline_fraction(spectrum(np.zeros(11)))


def test_noise_floor_flat():
    fc_spec = spectrum(np.zeros(21), (0, 20))
    fc_spec.amplitudes = np.full(20, np.sqrt(0.3) + 0j)
    assert noise_floor(fc_spec) == pytest.approx(0.3, rel=1e-12)


def test_noise_floor_pure():
    assert noise_floor(spectrum((-1.0) ** np.arange(41), (0, 40))) == pytest.approx(0, abs=1e-20)


def fc_of(A, B, N):
    return CrystallineFraction(A / B, np.nan, 0.0, N, Fraction(1, 2), A, B)


def test_fraction_error_limits():
    fc = fc_of(3.0, 10.0, 50)
    assert fraction_error(fc, 0.0) == 0.0
    full = fc_of(10.0, 10.0, 50)
    assert fraction_error(full, 0.1) == pytest.approx(0.1 * 49 / 10, rel=1e-12)
    assert fraction_error(fc_of(0.0, 10.0, 50), 0.1) == pytest.approx(0.01)
    with pytest.raises(ValueError):
        fraction_error(fc, -1.0)


def test_fraction_error_symbolic():
    A, B, N, s = sp.symbols("A B N s", positive=True)
    f = A / B
    expr = f * sp.sqrt((s / A) ** 2 + (N * s / B) ** 2 - 2 * N * s**2 / (A * B))
    fn = sp.lambdify((A, B, N, s), expr, "numpy")
    rng = np.random.default_rng(7)
    for _ in range(10):
        a, b, n, sig = rng.uniform(0.1, 5), rng.uniform(5, 50), rng.integers(4, 80), rng.uniform(0, 1)
        assert fraction_error(fc_of(a, b, n), sig) == pytest.approx(float(fn(a, b, n, sig)),
                                                                    rel=1e-12)


@pytest.mark.parametrize("A,B,N,s", [(20.0, 50.0, 50, 0.01), (5.0, 30.0, 50, 0.005),
                                     (40.0, 45.0, 48, 0.02)])
def test_fraction_error_monte_carlo(A, B, N, s):
    # a common background shift eps ~ N(0, s) in every bin moves A by eps and B by N eps
    eps = np.random.default_rng(11).normal(0, s, 10**4)
    f = (A + eps) / (B + N * eps)
    assert f.std() == pytest.approx(fraction_error(fc_of(A, B, N), s), rel=0.2)


def test_stft_stationary():
    pk = stft_peak((-1.0) ** np.arange(101), m=20)
    assert len(pk.n_sweep) == 81
    assert pk.power == pytest.approx(np.full(81, 400.0), rel=1e-12)


def test_stft_decaying():
    n = np.arange(201)
    pk = stft_peak((-1.0) ** n * np.exp(-n / 30.0), m=20)
    assert np.all(np.diff(pk.power) < 0)


def test_stft_overrun():
    with pytest.raises(ValueError):
        stft_peak(np.ones(10), m=20)


def test_lifetime_two_timescales():
    n = np.arange(301)
    amp = np.sqrt(double_exponential(n, 0.6, 6.0, 0.4, 80.0))
    tr = (-1.0) ** n * amp
    lt = dtc_lifetime(tr, m=2, period=0.5)
    # m = 2 windows average neighbouring cycles, so the slow constant survives
    assert lt.fit.lifetime_cycles == pytest.approx(160.0, rel=0.05)
    assert lt.lifetime_us == pytest.approx(80.0, rel=0.05)


def test_lifetime_pure_exponential():
    n = np.arange(301)
    tr = (-1.0) ** n * np.exp(-n / 50.0)
    lt = dtc_lifetime(tr, m=20, period=1.0)
    assert lt.fit.lifetime_cycles == pytest.approx(50.0, rel=1e-4)


def test_disorder_average():
    a, b = np.arange(5.0), np.ones(5)
    assert disorder_average([a, b]) == pytest.approx((a + b) / 2)
    with pytest.raises(ValueError):
        disorder_average([])
