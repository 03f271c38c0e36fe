"""Waveform synthesis and the evaluation metrics: PAPR, cubic metric,
peak cross-correlation, fractional-shift cross-correlation, CCDF curves.

Synthesis applies an unnormalized inverse DFT, i.e. the time samples are
the frequency-domain polynomial evaluated on a dense unit-circle grid.
Cross-correlation comes in two deliberately independent flavours: the
FFT-based peak correlation used for reporting, and an explicit
inner-product sweep over a fractional shift grid used by the set search;
the two agree analytically and the tests hold them against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .interlace import SparseSpectrum
from .seqcore import as_sequence


@dataclass(frozen=True, eq=False)
class Waveform:
    """Time-domain samples of one OFDM symbol."""

    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("waveform must be a nonempty 1-D array")
        object.__setattr__(self, "samples", samples)

    @property
    def mean_power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))

    @property
    def peak_power(self) -> float:
        return float(np.max(np.abs(self.samples) ** 2))


def synthesize(spectrum: SparseSpectrum, n_idft: int) -> Waveform:
    """Oversampled OFDM symbol for a sparse spectrum.

    Places the entries on an ``n_idft``-point grid and applies the
    unnormalized inverse DFT, so sample t equals the spectrum polynomial
    evaluated at exp(2j*pi*t/n_idft).  ``n_idft`` must be a power of two
    at least as large as the grid.
    """
    n_idft = int(n_idft)
    if n_idft < spectrum.grid_size:
        raise ValueError("n_idft must cover the spectrum grid")
    if n_idft & (n_idft - 1):
        raise ValueError("n_idft must be a power of two")
    dense = np.zeros(n_idft, dtype=complex)
    dense[spectrum.indices] = spectrum.values
    return Waveform(np.fft.ifft(dense) * n_idft)


def papr_db(waveform: Waveform) -> float:
    """Peak-to-average power ratio in dB."""
    mean = waveform.mean_power
    if mean == 0.0:
        raise ValueError("all-zero waveform has no PAPR")
    return float(10.0 * np.log10(waveform.peak_power / mean))


def cm_db(waveform: Waveform) -> float:
    """Cubic metric in dB: 20*log10(rms(|v|^3))/1.56 after normalizing the
    waveform to unit mean power.  Invariant to positive scaling."""
    mean = waveform.mean_power
    if mean == 0.0:
        raise ValueError("all-zero waveform has no cubic metric")
    v_norm = np.abs(waveform.samples) / np.sqrt(mean)
    rms_cubed = np.sqrt(np.mean(v_norm**6))
    return float(20.0 * np.log10(rms_cubed) / 1.56)


def peak_xcorr(x_i, x_j, n_idft: int = 4096) -> float:
    """Peak cross-correlation over a dense cyclic-shift grid.

    Computes the element-wise product of ``x_i`` and the conjugate of
    ``x_j``, takes the maximum modulus of its zero-padded unnormalized
    inverse DFT, and divides by the sequence length.
    """
    a = as_sequence(x_i)
    b = as_sequence(x_j)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    n_idft = int(n_idft)
    if n_idft < a.size:
        raise ValueError("n_idft must be at least the sequence length")
    product = a * np.conj(b)
    transform = np.fft.ifft(product, n_idft) * n_idft
    return float(np.max(np.abs(transform)) / a.size)


@lru_cache(maxsize=32)
def shift_matrix(n: int, u: int) -> np.ndarray:
    """Phasor table exp(2j*pi*n*delta/N) for delta = 0, 1/u, ..., (N*u-1)/u.

    Row t applies the fractional shift t/u; cached because the set search
    reuses one geometry for every candidate test.
    """
    deltas = np.arange(n * u) / float(u)
    return np.exp(2j * np.pi * np.outer(deltas, np.arange(n)) / n)


def fractional_xcorr_max(c_i, c_j, u: int) -> float:
    """Largest normalized inner product between ``c_i`` and all fractional
    cyclic modulations of ``c_j`` on the grid with ``u`` points per shift.

    Evaluated by explicit inner products (not an FFT) so it stays an
    independent check of :func:`peak_xcorr`.
    """
    a = as_sequence(c_i)
    b = as_sequence(c_j)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    u = int(u)
    if u < 1:
        raise ValueError("shift grid density must be >= 1")
    products = shift_matrix(a.size, u) @ (np.conj(a) * b)
    return float(np.max(np.abs(products)) / a.size)


@dataclass(frozen=True, eq=False)
class CcdfCurve:
    """Complementary CDF samples: P(value > threshold) per threshold."""

    thresholds: np.ndarray
    exceed_prob: np.ndarray

    def __post_init__(self):
        thr = np.asarray(self.thresholds, dtype=float)
        prob = np.asarray(self.exceed_prob, dtype=float)
        if thr.shape != prob.shape or thr.ndim != 1:
            raise ValueError("thresholds and probabilities must match 1-D shapes")
        if np.any(np.diff(thr) < 0):
            raise ValueError("thresholds must be nondecreasing")
        if np.any((prob < 0) | (prob > 1)):
            raise ValueError("probabilities must lie in [0, 1]")
        if np.any(np.diff(prob) > 0):
            raise ValueError("exceed probabilities must be nonincreasing")
        object.__setattr__(self, "thresholds", thr)
        object.__setattr__(self, "exceed_prob", prob)


def ccdf(values, thresholds) -> CcdfCurve:
    """Empirical exceedance curve of ``values`` over sorted thresholds."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("need at least one value")
    thr = np.sort(np.asarray(thresholds, dtype=float))
    prob = np.array([(values > t).mean() for t in thr])
    return CcdfCurve(thr, prob)
