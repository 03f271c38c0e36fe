"""Independent oracles shared by the test modules.

These deliberately avoid the library's coefficient-domain code paths:
polynomials are evaluated by direct summation so they can vouch for the
upsample/convolve/pad implementations, and spectra are synthesized by an
O(N^2) loop to vouch for the FFT path.
"""

import numpy as np


def poly_eval(coeffs, z: complex) -> complex:
    """Evaluate sum(coeffs[i] * z**i) by direct accumulation."""
    total = 0j
    power = 1.0 + 0j
    for c in np.asarray(coeffs, dtype=complex):
        total += c * power
        power *= z
    return total


def dft_synthesis_oracle(indices, values, n_idft: int) -> np.ndarray:
    """Unnormalized inverse DFT by direct evaluation on the unit circle."""
    t = np.arange(n_idft)
    out = np.zeros(n_idft, dtype=complex)
    for idx, val in zip(indices, values):
        out += val * np.exp(2j * np.pi * idx * t / n_idft)
    return out


def unit_circle_points(rng: np.random.Generator, count: int) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(count))


def random_unimodular(rng: np.random.Generator, length: int) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(length))
