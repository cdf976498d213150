"""Spectra, crystalline fraction, noise floor and lifetime extraction.

DFT convention: S(k/N) = sum_n P(n) exp(+i 2 pi n k / N) over the absolute
cycle index n in the window (n_start, n_end], with no taper or padding.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from dtckit.fitting import (BoundaryFit, DoubleExpFit, fit_double_exponential,
                            fit_super_gaussian)

DEFAULT_STFT_WINDOW = 20


@dataclass
class Spectrum:
    nu: np.ndarray
    amplitudes: np.ndarray
    window: tuple

    @property
    def N(self):
        return len(self.nu)

    @property
    def power(self):
        return np.abs(self.amplitudes) ** 2

    @property
    def total_power(self):
        return float(self.power.sum())


@dataclass
class CrystallineFraction:
    f: float
    delta_f: float
    sigma_n: float
    N: int
    target_nu: Fraction
    peak_power: float
    total_power: float


def _values(trace):
    return np.asarray(getattr(trace, "values", trace), dtype=float)


def spectrum(trace, window=None) -> Spectrum:
    """DFT of a trace (or plain array) over the cycle window (n_start, n_end].

    ``window=None`` takes every sample, n = 0..n_max.
    """
    P = _values(trace)
    n_max = len(P) - 1
    if window is None:
        window = (-1, n_max)
    n_start, n_end = int(window[0]), int(window[1])
    if n_end <= n_start:
        raise ValueError(f"empty window ({n_start}, {n_end}]")
    if n_start < -1 or n_end > n_max:
        raise ValueError(f"window ({n_start}, {n_end}] outside trace 0..{n_max}")
    N = n_end - n_start
    if N < 2:
        raise ValueError("window needs at least 2 samples")
    x = P[n_start + 1:n_end + 1]
    k = np.arange(N)
    # ifft carries the positive exponent; shift the origin to n_start + 1
    S = np.fft.ifft(x) * N * np.exp(2j * np.pi * (n_start + 1) * k / N)
    return Spectrum(k / N, S, (n_start, n_end))


def _as_fraction(target_nu):
    if isinstance(target_nu, str):
        return Fraction(target_nu)
    fr = Fraction(target_nu).limit_denominator(12)
    if abs(float(fr) - float(target_nu)) > 1e-9:
        raise ValueError(f"unsupported target frequency {target_nu}")
    return fr


def target_bins(N, target_nu):
    """Bin indices holding the subharmonic peak (conjugate pair for 1/3)."""
    nu = _as_fraction(target_nu)
    if nu == Fraction(1, 2):
        if N % 2:
            raise ValueError(f"nu=1/2 is not on the grid for N={N}")
        return [N // 2]
    if nu == Fraction(1, 3):
        if N % 3:
            raise ValueError(f"nu=1/3 is not on the grid for N={N}")
        return [N // 3, 2 * N // 3]
    raise ValueError(f"target_nu must be 1/2 or 1/3, got {target_nu}")


def noise_floor(spec: Spectrum, exclude=0.5, normalize=False):
    """Mean plus one standard deviation of the background power.

    The background drops the target bin(s) and the DC bin. With
    ``normalize`` the power is first divided by the total power.
    """
    drop = set(target_bins(spec.N, exclude)) | {0}
    keep = [k for k in range(spec.N) if k not in drop]
    if len(keep) < 3:
        raise ValueError("fewer than 3 background bins")
    p = spec.power[keep]
    if normalize:
        tot = spec.total_power
        p = p / tot if tot > 0 else p
    return float(p.mean() + p.std())


def fraction_error(fc: CrystallineFraction, sigma_n):
    """Propagated error of f for a background noise level ``sigma_n``:

        delta_f = f sqrt((s/A)^2 + (N s/B)^2 - 2 N s^2 / (A B))

    with A the peak power and B the total power.
    """
    if sigma_n < 0:
        raise ValueError("sigma_n must be non-negative")
    A, B, N, s = fc.peak_power, fc.total_power, fc.N, float(sigma_n)
    if s == 0:
        return 0.0
    if A == 0:
        # f -> 0 limit of the same expression
        return s / B
    rad = (s / A) ** 2 + (N * s / B) ** 2 - 2 * N * s**2 / (A * B)
    return float(fc.f * np.sqrt(max(rad, 0.0)))


def crystalline_fraction(spec: Spectrum, target_nu=0.5, sigma_n=None) -> CrystallineFraction:
    """Share of the spectral power in the subharmonic bin(s).

    ``sigma_n`` defaults to the spectrum's own noise floor (NaN if there are
    too few background bins).
    """
    nu = _as_fraction(target_nu)
    bins = target_bins(spec.N, nu)
    B = spec.total_power
    if not B > 0:
        raise ValueError("zero total spectral power")
    A = float(spec.power[bins].sum())
    f = min(A / B, 1.0)
    if sigma_n is None:
        try:
            sigma_n = noise_floor(spec, nu)
        except ValueError:
            sigma_n = np.nan
    fc = CrystallineFraction(f, np.nan, float(sigma_n), spec.N, nu, A, B)
    if np.isfinite(sigma_n):
        fc.delta_f = fraction_error(fc, sigma_n)
    return fc


@dataclass
class StftPeak:
    n_sweep: np.ndarray
    power: np.ndarray
    m: int
    target_nu: Fraction


def stft_peak(trace, m=DEFAULT_STFT_WINDOW, target_nu=0.5) -> StftPeak:
    """Target-bin power of the spectrum over (n_sweep, n_sweep + m] for every
    admissible window start n_sweep = 0, 1, ..."""
    P = _values(trace)
    n_max = len(P) - 1
    if m > n_max:
        raise ValueError(f"window length {m} overruns trace with {len(P)} samples")
    bins = target_bins(m, target_nu)
    starts = np.arange(0, n_max - m + 1)
    # rows are windows x[n_sweep+1 .. n_sweep+m]
    idx = starts[:, None] + 1 + np.arange(m)[None, :]
    X = P[idx]
    k = np.array(bins)
    phase = np.exp(2j * np.pi * np.outer(np.arange(m), k) / m)
    S = X @ phase
    return StftPeak(starts, (np.abs(S) ** 2).sum(axis=1), m, _as_fraction(target_nu))


@dataclass
class Lifetime:
    stft: StftPeak
    fit: DoubleExpFit

    @property
    def lifetime_us(self):
        return self.fit.lifetime_us


def dtc_lifetime(trace, m=DEFAULT_STFT_WINDOW, target_nu=0.5, period=None, floor=0.0) -> Lifetime:
    """STFT peak decay fitted with a double exponential.

    The peak is a power, so the amplitude lifetime is twice the fitted slow
    constant. Points at or below ``floor`` are dropped before fitting.
    """
    pk = stft_peak(trace, m, target_nu)
    if period is None:
        period = getattr(trace, "period", None)
    keep = pk.power > floor
    fit = fit_double_exponential(pk.n_sweep[keep], pk.power[keep], period=period, power=True)
    return Lifetime(pk, fit)


def disorder_average(traces):
    """Mean trace over realizations (arrays or PolarizationTrace objects)."""
    vals = [_values(t) for t in traces]
    if not vals:
        raise ValueError("no traces")
    return np.mean(vals, axis=0)


def boundary_from_fractions(theta, f, delta_f=None, threshold=0.1) -> BoundaryFit:
    """Phase-boundary readout: super-Gaussian fit of f(theta) at one tau1."""
    return fit_super_gaussian(theta, f, delta_f, threshold)
