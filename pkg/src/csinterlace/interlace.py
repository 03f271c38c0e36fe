"""Frequency-domain interlace builders.

An interlace is ``n_rb`` resource blocks of ``n_sc`` tones separated by
``n_null`` empty tones.  The non-coherent builder spreads a per-block pair
across blocks with phase rotations from a shorter spreading pair; the
coherent builder interleaves two half-block sequences inside every block so
that fixing one phase coefficient leaves built-in reference tones.  Both are
instances of the generalized pair construction in :mod:`csinterlace.golay`,
so every output waveform inherits the 3 dB peak-power bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .golay import ConstructionParams, GolayPair, combine_gcps
from .seqcore import as_sequence, cyclic_modulate

# Unit phasors usable as data coefficients in the coherent scheme.
QPSK_PHASES = np.exp(1j * np.pi * np.array([1, 3, -1, -3]) / 4)

PILOT_PHASE = complex(QPSK_PHASES[0])

# Cyclic-shift payload maps: maximal separation inside a user's shift block.
SHIFT_MAP_1BIT = (0, 6)
SHIFT_MAP_2BIT = (0, 3, 6, 9)


@dataclass(frozen=True)
class InterlaceConfig:
    """Interlace geometry: block count, tones per block, nulls between blocks."""

    n_rb: int
    n_sc: int
    n_null: int = 0

    def __post_init__(self):
        if self.n_rb < 2:
            raise ValueError("n_rb must be >= 2")
        if self.n_sc < 2:
            raise ValueError("n_sc must be >= 2")
        if self.n_null < 0:
            raise ValueError("n_null must be >= 0")

    @property
    def rb_spacing(self) -> int:
        return self.n_sc + self.n_null

    @property
    def grid_size(self) -> int:
        return self.n_rb * self.n_sc + (self.n_rb - 1) * self.n_null

    def support(self) -> np.ndarray:
        """Occupied tone indices: n_rb runs of n_sc spaced rb_spacing apart."""
        starts = np.arange(self.n_rb) * self.rb_spacing
        return (starts[:, None] + np.arange(self.n_sc)[None, :]).reshape(-1)


@dataclass(frozen=True, eq=False)
class SparseSpectrum:
    """Frequency-domain sequence as (tone index, complex value) entries."""

    indices: np.ndarray
    values: np.ndarray
    grid_size: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=complex)
        if idx.ndim != 1 or val.ndim != 1 or idx.size != val.size:
            raise ValueError("indices and values must be 1-D and equally long")
        if idx.size == 0:
            raise ValueError("spectrum must have at least one entry")
        if np.any(np.diff(idx) <= 0):
            raise ValueError("indices must be strictly increasing")
        if idx[0] < 0 or idx[-1] >= self.grid_size:
            raise ValueError("indices out of grid")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    def to_dense(self, size: int | None = None) -> np.ndarray:
        size = self.grid_size if size is None else int(size)
        if size < self.grid_size:
            raise ValueError("dense size smaller than grid")
        out = np.zeros(size, dtype=complex)
        out[self.indices] = self.values
        return out

    def to_json_dict(self) -> dict:
        return {
            "grid_size": int(self.grid_size),
            "entries": [
                [int(i), [float(v.real), float(v.imag)]]
                for i, v in zip(self.indices, self.values)
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SparseSpectrum":
        entries = data["entries"]
        idx = np.array([e[0] for e in entries], dtype=np.int64)
        val = np.array([complex(e[1][0], e[1][1]) for e in entries], dtype=complex)
        return cls(idx, val, int(data["grid_size"]))

    @classmethod
    def from_dense(cls, dense, grid_size: int | None = None) -> "SparseSpectrum":
        dense = np.asarray(dense, dtype=complex)
        idx = np.flatnonzero(dense)
        size = dense.size if grid_size is None else grid_size
        return cls(idx, dense[idx], size)


def is_valid_interlace(spectrum: SparseSpectrum, cfg: InterlaceConfig) -> bool:
    """Occupied tones form exactly the configured block pattern."""
    return spectrum.grid_size == cfg.grid_size and np.array_equal(
        spectrum.indices, cfg.support()
    )


def rb_values(spectrum: SparseSpectrum, cfg: InterlaceConfig) -> np.ndarray:
    """Occupied values reshaped to one row per resource block.

    Cross-correlation between schemes is compared block-by-block (a
    neighbouring cell interferes on the same blocks), so metrics sweep the
    rows of this matrix.
    """
    if not is_valid_interlace(spectrum, cfg):
        raise ValueError("spectrum does not occupy the configured interlace")
    return spectrum.values.reshape(cfg.n_rb, cfg.n_sc)


@dataclass(frozen=True)
class UciPayload:
    """Control payload: 1 or 2 information bits plus the user resource.

    Non-coherent transport maps bits to a cyclic shift inside the user's
    block of shift resources; coherent transport maps them to the data
    phase coefficient while the pilot coefficient stays fixed.
    """

    scheme: str
    bits: int
    value: int = 0
    user_shift: int = 0

    def __post_init__(self):
        if self.scheme not in ("noncoherent", "coherent"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.bits not in (1, 2):
            raise ValueError("payload carries 1 or 2 bits")
        if not 0 <= self.value < 2**self.bits:
            raise ValueError("payload value out of range for bit count")

    def shift(self, n_sc: int = 12) -> int:
        if self.scheme != "noncoherent":
            raise ValueError("cyclic shifts apply to the non-coherent scheme")
        table = SHIFT_MAP_1BIT if self.bits == 1 else SHIFT_MAP_2BIT
        return (self.user_shift + table[self.value]) % n_sc

    def phases(self) -> tuple[complex, complex]:
        if self.scheme != "coherent":
            raise ValueError("phase pairs apply to the coherent scheme")
        if self.bits == 1:
            # antipodal points of the alphabet for maximum distance
            data = complex(QPSK_PHASES[0]) if self.value == 0 else complex(QPSK_PHASES[3])
        else:
            data = complex(QPSK_PHASES[self.value])
        return PILOT_PHASE, data


def _spectrum_from_pair(pair: GolayPair, cfg: InterlaceConfig) -> SparseSpectrum:
    coeff = pair.a
    if coeff.size != cfg.grid_size:
        raise ValueError(
            f"construction length {coeff.size} does not match grid {cfg.grid_size}"
        )
    support = cfg.support()
    dense = np.zeros(cfg.grid_size, dtype=complex)
    dense[: coeff.size] = coeff
    off_support = np.delete(dense, support)
    if np.max(np.abs(off_support), initial=0.0) != 0.0:
        raise ValueError("construction spilled energy outside the interlace support")
    return SparseSpectrum(support, dense[support], cfg.grid_size)


def noncoherent_pair(
    cfg: InterlaceConfig,
    spread: GolayPair,
    rb_pair: GolayPair,
    delta: float = 0.0,
    adjacent: bool = False,
) -> GolayPair:
    """Full construction output for the non-coherent interlace.

    The first member is the transmitted spectrum's coefficient sequence;
    the second is its complementary mate (useful for asserting the pair
    property).  ``delta`` cyclically modulates both block sequences, which
    preserves complementarity, so every shift resource keeps the bound.
    """
    if cfg.n_rb % 2 != 0:
        raise ValueError("non-coherent scheme needs an even block count")
    if spread.length != cfg.n_rb // 2:
        raise ValueError(f"spreading pair must have length {cfg.n_rb // 2}")
    if rb_pair.length != cfg.n_sc:
        raise ValueError(f"block pair must have length {cfg.n_sc}")
    # Modulation keeps the pair complementary; the phasor table is float,
    # so any nonzero shift certifies on the float tolerance path.
    shifted = GolayPair.certify(
        cyclic_modulate(rb_pair.a, delta),
        cyclic_modulate(rb_pair.b, delta),
        tol=0.0 if float(delta) == 0.0 else 1e-9,
    )
    spacing = cfg.rb_spacing
    if adjacent:
        params = ConstructionParams(
            phase1=PILOT_PHASE, phase2=PILOT_PHASE,
            step1=2 * spacing, step2=1, offset=spacing,
        )
    else:
        params = ConstructionParams(
            phase1=PILOT_PHASE, phase2=PILOT_PHASE,
            step1=spacing, step2=1, offset=spacing * cfg.n_rb // 2,
        )
    return combine_gcps(spread, shifted, params)


def build_noncoherent(
    cfg: InterlaceConfig,
    spread: GolayPair,
    rb_pair: GolayPair,
    delta: float = 0.0,
) -> SparseSpectrum:
    """Non-coherent interlace: half the blocks carry the first block
    sequence, the other half the second, phase-rotated per the spreading
    pair elements."""
    return _spectrum_from_pair(noncoherent_pair(cfg, spread, rb_pair, delta), cfg)


def build_noncoherent_adjacent(
    cfg: InterlaceConfig,
    spread: GolayPair,
    rb_pair: GolayPair,
    delta: float = 0.0,
) -> SparseSpectrum:
    """Variant with the two block sequences on alternating adjacent blocks."""
    return _spectrum_from_pair(
        noncoherent_pair(cfg, spread, rb_pair, delta, adjacent=True), cfg
    )


def coherent_pair(
    cfg: InterlaceConfig,
    spread: GolayPair,
    half_pair: GolayPair,
    phases: tuple[complex, complex],
) -> GolayPair:
    """Construction output for the coherent interlace (see builder)."""
    if cfg.n_sc % 2 != 0:
        raise ValueError("coherent scheme needs an even block size")
    if spread.length != cfg.n_rb:
        raise ValueError(f"spreading pair must have length {cfg.n_rb}")
    if half_pair.length != cfg.n_sc // 2:
        raise ValueError(f"half-block pair must have length {cfg.n_sc // 2}")
    phase1, phase2 = complex(phases[0]), complex(phases[1])
    params = ConstructionParams(
        phase1=phase1, phase2=phase2, step1=cfg.rb_spacing, step2=2, offset=1
    )
    return combine_gcps(spread, half_pair, params)


def build_coherent(
    cfg: InterlaceConfig,
    spread: GolayPair,
    half_pair: GolayPair,
    phases: tuple[complex, complex],
) -> SparseSpectrum:
    """Coherent interlace with built-in reference tones.

    Within block r, even local tones carry phase1 * spread.a[r] * half.a and
    odd local tones carry phase2 * spread.b[r] * half.b; fixing phase1 makes
    the even tones known pilots while phase2 carries one data symbol.
    """
    return _spectrum_from_pair(coherent_pair(cfg, spread, half_pair, phases), cfg)


def zc_sequence(root: int, length: int = 113, total: int | None = None) -> np.ndarray:
    """Zadoff-Chu sequence of odd-prime length, cyclically extended."""
    if not 1 <= root < length:
        raise ValueError("root must be in 1..length-1")
    n = np.arange(total if total is not None else length)
    return np.exp(-1j * np.pi * root * ((n % length) * ((n % length) + 1)) / length)


def zadoff_chu_set(
    cfg: InterlaceConfig, set_size: int, n_idft: int = 4096
) -> list[SparseSpectrum]:
    """Baseline set: the ``set_size`` lowest-PAPR roots of the length-113
    Zadoff-Chu family, cyclically padded onto the interlace tones."""
    from .metrics import papr_db, synthesize  # local import to avoid a cycle

    total = cfg.n_rb * cfg.n_sc
    if total != 120:
        raise ValueError("the length-113 baseline maps onto 120 occupied tones")
    if not 1 <= set_size <= 112:
        raise ValueError("set_size must be within the 112 available roots")
    support = cfg.support()
    scored = []
    for root in range(1, 113):
        spectrum = SparseSpectrum(support, zc_sequence(root, 113, total), cfg.grid_size)
        scored.append((papr_db(synthesize(spectrum, n_idft)), root, spectrum))
    scored.sort(key=lambda item: (item[0], item[1]))
    return [spectrum for _, _, spectrum in scored[:set_size]]


def cycling_baseline(cfg: InterlaceConfig, base) -> SparseSpectrum:
    """Comparison scheme: block k carries the base sequence cyclically
    shifted in time by k (progressive per-block modulation)."""
    base = as_sequence(base)
    if base.size != cfg.n_sc:
        raise ValueError(f"base sequence must have length {cfg.n_sc}")
    values = np.concatenate(
        [cyclic_modulate(base, k) for k in range(cfg.n_rb)]
    )
    return SparseSpectrum(cfg.support(), values, cfg.grid_size)
