"""Golay complementary pairs: certified pair objects, the generalized
concatenation/interleaving construction, equivalence orbits, and exhaustive
enumeration of all quaternary pairs up to length 12.

Enumeration canonicalizes by global phase (first element of each sequence
forced to +1) and by lexicographic pair order, then buckets sequences by
their exact integer autocorrelation vectors; complementary mates are found
by matching a bucket with its negated counterpart.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .seqcore import (
    QUATERNARY_SYMBOLS,
    QUATERNARY_VALUES,
    as_sequence,
    convolve,
    format_quaternary,
    is_gcp,
    is_quaternary,
    pad,
    parse_quaternary,
    reverse_conjugate,
    upsample,
)

MAX_ENUMERATION_LENGTH = 12  # 4**12 raw sequences; documented capacity limit

FLOAT_GCP_TOL = 1e-9


class CertificationError(Exception):
    """A pair handed to the verifying constructor is not complementary."""


@dataclass(frozen=True, eq=False)
class GolayPair:
    """Two equal-length sequences certified complementary.

    Build instances through :meth:`certify`, which checks the defining
    autocorrelation cancellation before returning.
    """

    a: np.ndarray
    b: np.ndarray
    certified: bool = False

    def __eq__(self, other) -> bool:
        if not isinstance(other, GolayPair):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    def __hash__(self):
        return hash((self.a.tobytes(), self.b.tobytes()))

    @classmethod
    def certify(cls, a, b, tol: float = 0.0) -> "GolayPair":
        arr_a = as_sequence(a).copy()
        arr_b = as_sequence(b).copy()
        if arr_a.size != arr_b.size:
            raise ValueError(f"length mismatch: {arr_a.size} vs {arr_b.size}")
        if not is_gcp(arr_a, arr_b, tol):
            raise CertificationError(
                f"sequences of length {arr_a.size} are not complementary at tol={tol}"
            )
        arr_a.setflags(write=False)
        arr_b.setflags(write=False)
        return cls(arr_a, arr_b, certified=True)

    @classmethod
    def from_strings(cls, a: str, b: str) -> "GolayPair":
        return cls.certify(parse_quaternary(a), parse_quaternary(b))

    @property
    def length(self) -> int:
        return self.a.size

    @property
    def energy(self) -> float:
        """Total lag-0 energy of both members."""
        return float(np.sum(np.abs(self.a) ** 2) + np.sum(np.abs(self.b) ** 2))

    def as_strings(self) -> tuple[str, str]:
        return format_quaternary(self.a), format_quaternary(self.b)


@dataclass(frozen=True)
class ConstructionParams:
    """Parameters of the pair-combining construction.

    The first seed pair is upsampled by ``step1``, the second by ``step2``;
    the second branch is offset by ``offset`` null symbols and both branches
    carry unit-modulus phase coefficients.
    """

    phase1: complex = 1.0 + 0j
    phase2: complex = 1.0 + 0j
    step1: int = 1
    step2: int = 1
    offset: int = 0

    def __post_init__(self):
        if abs(abs(complex(self.phase1)) - 1.0) > 1e-12:
            raise ValueError("phase1 must be unit modulus")
        if abs(abs(complex(self.phase2)) - 1.0) > 1e-12:
            raise ValueError("phase2 must be unit modulus")
        if self.step1 < 1 or self.step2 < 1:
            raise ValueError("upsampling steps must be >= 1")
        if self.offset < 0:
            raise ValueError("offset must be >= 0")


def _padded_sum(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = max(x.size, y.size)
    out = np.zeros(n, dtype=complex)
    out[: x.size] += x
    out[: y.size] += y
    return out


def combine_gcps(
    first: GolayPair,
    second: GolayPair,
    params: ConstructionParams,
    tol: float = FLOAT_GCP_TOL,
) -> GolayPair:
    """Build a longer complementary pair out of two seed pairs.

    The output coefficient sequences are

        f = p1 * up(a, step1) (*) up(c, step2)
          + p2 * up(b, step1) (*) up(d, step2) shifted by ``offset``
        g = p1 * up(a, step1) (*) up(rc(d), step2)
          - p2 * up(b, step1) (*) up(rc(c), step2) shifted by ``offset``

    with (a, b) the first pair, (c, d) the second, ``(*)`` linear
    convolution and ``rc`` reverse conjugation.  Overlapping supports sum;
    the result is complementary for any parameter choice, and every output
    is re-certified before being returned (a failure indicates a bug, not
    bad input).
    """
    p = params
    ua = upsample(first.a, p.step1)
    ub = upsample(first.b, p.step1)
    uc = upsample(second.a, p.step2)
    ud = upsample(second.b, p.step2)
    urc_c = upsample(reverse_conjugate(second.a), p.step2)
    urc_d = upsample(reverse_conjugate(second.b), p.step2)

    f = _padded_sum(p.phase1 * convolve(ua, uc), pad(p.phase2 * convolve(ub, ud), p.offset))
    g = _padded_sum(
        p.phase1 * convolve(ua, urc_d), pad(-p.phase2 * convolve(ub, urc_c), p.offset)
    )
    return GolayPair.certify(f, g, tol)


def equivalence_orbit(pair: GolayPair, tol: float = 0.0) -> list[GolayPair]:
    """The eight complementarity-preserving variants of a pair.

    Composes three involutions: swapping the members, reversing both
    sequences, and reverse-conjugating both sequences.  Each composition is
    re-certified.  Variants may coincide as values for symmetric pairs; the
    eight transform labels are always returned in a fixed order.
    """
    out = []
    for swap in (False, True):
        for rev in (False, True):
            for conj_rev in (False, True):
                a, b = (pair.b, pair.a) if swap else (pair.a, pair.b)
                if rev:
                    a, b = a[::-1], b[::-1]
                if conj_rev:
                    a, b = reverse_conjugate(a), reverse_conjugate(b)
                out.append(GolayPair.certify(a, b, tol))
    return out


# ---------------------------------------------------------------------------
# Exhaustive enumeration
# ---------------------------------------------------------------------------

def _check_capacity(length: int) -> int:
    length = int(length)
    if length < 1:
        raise ValueError("length must be >= 1")
    if length > MAX_ENUMERATION_LENGTH:
        raise ValueError(
            f"enumeration supports lengths up to {MAX_ENUMERATION_LENGTH} "
            f"(4**{length} sequences exceed the documented capacity)"
        )
    return length


def _decode_canonical(indices: np.ndarray, length: int) -> np.ndarray:
    """Canonical sequence values for base-4 ranks (first element fixed to +1)."""
    count = indices.size
    codes = np.zeros((count, length), dtype=np.int8)
    rem = indices.astype(np.int64)
    for pos in range(length - 1, 0, -1):
        codes[:, pos] = rem % 4
        rem //= 4
    return QUATERNARY_VALUES[codes]


def _apac_keys(length: int, chunk: int = 1 << 19) -> np.ndarray:
    """Integer autocorrelation keys (re/im interleaved, lags 1..N-1) for all
    canonical sequences of the given length, in lexicographic order."""
    total = 4 ** (length - 1)
    keys = np.empty((total, 2 * (length - 1)), dtype=np.int8)
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        arr = _decode_canonical(np.arange(start, stop), length)
        for k in range(1, length):
            acf = np.sum(np.conj(arr[:, : length - k]) * arr[:, k:], axis=1)
            keys[start:stop, 2 * (k - 1)] = acf.real.astype(np.int8)
            keys[start:stop, 2 * (k - 1) + 1] = acf.imag.astype(np.int8)
    return keys


def _pack_keys(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pack signed key rows into (hi, lo) uint64 words preserving lex order."""
    shifted = keys.astype(np.int64) + 16  # |component| <= 12, so 5 bits suffice
    ncols = shifted.shape[1]
    hi = np.zeros(shifted.shape[0], dtype=np.uint64)
    lo = np.zeros(shifted.shape[0], dtype=np.uint64)
    for col in range(min(ncols, 12)):
        hi = (hi << np.uint64(5)) | shifted[:, col].astype(np.uint64)
    for col in range(12, ncols):
        lo = (lo << np.uint64(5)) | shifted[:, col].astype(np.uint64)
    return hi, lo


def _mate_index_pairs(length: int) -> tuple[np.ndarray, np.ndarray]:
    """All (i, j) canonical-rank pairs whose autocorrelations cancel.

    Matches every key vector against its exact negation, so membership in
    the result is itself the complementarity proof (integer arithmetic,
    no tolerance involved).
    """
    keys = _apac_keys(length)
    pos_hi, pos_lo = _pack_keys(keys)
    neg_hi, neg_lo = _pack_keys(-keys)
    total = pos_hi.size

    all_hi = np.concatenate([pos_hi, neg_hi])
    all_lo = np.concatenate([pos_lo, neg_lo])
    order = np.lexsort((all_lo, all_hi))
    sh = all_hi[order]
    sl = all_lo[order]
    new_group = np.empty(order.size, dtype=bool)
    new_group[0] = True
    new_group[1:] = (sh[1:] != sh[:-1]) | (sl[1:] != sl[:-1])
    gid = np.cumsum(new_group) - 1
    from_pos = order < total

    n_pos = np.bincount(gid, weights=from_pos).astype(np.int64)
    n_neg = np.bincount(gid, weights=~from_pos).astype(np.int64)
    starts = np.flatnonzero(new_group)
    ends = np.r_[starts[1:], order.size]

    first_idx: list[np.ndarray] = []
    second_idx: list[np.ndarray] = []
    for g in np.flatnonzero((n_pos > 0) & (n_neg > 0)):
        members = order[starts[g] : ends[g]]
        seqs_v = members[members < total]
        seqs_neg_v = members[members >= total] - total
        # Each unordered pair lives in two groups (key v and key -v);
        # emit only from the lexicographically smaller key.
        j0 = seqs_neg_v[0]
        if (sh[starts[g]], sl[starts[g]]) >= (pos_hi[j0], pos_lo[j0]):
            continue
        first_idx.append(np.repeat(seqs_v, seqs_neg_v.size))
        second_idx.append(np.tile(seqs_neg_v, seqs_v.size))

    if not first_idx:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    fa = np.concatenate(first_idx)
    fb = np.concatenate(second_idx)
    swap = fa > fb
    fa[swap], fb[swap] = fb[swap], fa[swap].copy()
    order = np.lexsort((fb, fa))
    return fa[order], fb[order]


def _pair_from_ranks(rank_a: int, rank_b: int, length: int) -> GolayPair:
    values = _decode_canonical(np.array([rank_a, rank_b]), length)
    pair = GolayPair(values[0], values[1], certified=True)
    pair.a.setflags(write=False)
    pair.b.setflags(write=False)
    return pair


def enumerate_gcps(length: int) -> list[GolayPair]:
    """All quaternary complementary pairs of a given length, canonicalized.

    Canonical form: each sequence is phase-rotated so its first element is
    +1, the pair is ordered lexicographically, and duplicates are removed.
    Pairs come out certified; the exact integer key matching inside
    :func:`_mate_index_pairs` is the complementarity proof.

    Lengths above 12 raise (4**length sequences; capacity limit).
    """
    length = _check_capacity(length)
    if length == 1:
        return [GolayPair.certify([1.0], [1.0])]
    idx_a, idx_b = _mate_index_pairs(length)
    return [_pair_from_ranks(int(i), int(j), length) for i, j in zip(idx_a, idx_b)]


def canonical_pair(a, b) -> tuple[str, str]:
    """Canonical symbol-string form of a quaternary pair.

    Normalizes each member's global phase (first element to +1) and orders
    the two sequences lexicographically by symbol code.
    """
    arr_a = as_sequence(a)
    arr_b = as_sequence(b)
    if not (is_quaternary(arr_a) and is_quaternary(arr_b)):
        raise ValueError("canonical form is defined for quaternary sequences")
    norm_a = format_quaternary(arr_a * np.conj(arr_a[0]))
    norm_b = format_quaternary(arr_b * np.conj(arr_b[0]))
    key = dict(zip(QUATERNARY_SYMBOLS, range(4)))

    def rank(s: str) -> tuple[int, ...]:
        return tuple(key[ch] for ch in s)

    return (norm_a, norm_b) if rank(norm_a) <= rank(norm_b) else (norm_b, norm_a)


@lru_cache(maxsize=None)
def _sorted_canonical_keys(length: int) -> tuple[np.ndarray, np.ndarray]:
    hi, lo = _pack_keys(_apac_keys(length))
    order = np.lexsort((lo, hi))
    return hi[order], lo[order]


def is_complementary_sequence(a) -> bool:
    """True iff some quaternary mate exists making ``a`` one half of a pair.

    Searches the negated-autocorrelation bucket of the exhaustive canonical
    enumeration; restricted to lengths up to 12 like the enumeration.
    """
    arr = as_sequence(a)
    _check_capacity(arr.size)
    if not is_quaternary(arr):
        raise ValueError("complementarity search is defined for quaternary sequences")
    if arr.size == 1:
        return True
    vec = np.empty(2 * (arr.size - 1), dtype=np.int8)
    for k in range(1, arr.size):
        acf = np.sum(np.conj(arr[: arr.size - k]) * arr[k:])
        vec[2 * (k - 1)] = int(round(acf.real))
        vec[2 * (k - 1) + 1] = int(round(acf.imag))
    want_hi, want_lo = _pack_keys(-vec[np.newaxis, :])
    hi, lo = _sorted_canonical_keys(arr.size)
    left = np.searchsorted(hi, want_hi[0], side="left")
    right = np.searchsorted(hi, want_hi[0], side="right")
    if left == right:
        return False
    sub = lo[left:right]
    pos = np.searchsorted(sub, want_lo[0], side="left")
    return bool(pos < sub.size and sub[pos] == want_lo[0])


# ---------------------------------------------------------------------------
# Disk cache (JSON of symbol strings, keyed by length)
# ---------------------------------------------------------------------------

def cached_enumerate_gcps(length: int, cache_dir: str | Path) -> list[GolayPair]:
    """Enumerate with a JSON disk cache so long runs happen once."""
    length = _check_capacity(length)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    cache_file = cache_dir / f"gcps_len{length}.json"
    if cache_file.exists():
        payload = json.loads(cache_file.read_text())
        if payload.get("length") == length:
            return [
                GolayPair(
                    parse_quaternary(sa), parse_quaternary(sb), certified=True
                )
                for sa, sb in payload["pairs"]
            ]
    pairs = enumerate_gcps(length)
    payload = {
        "length": length,
        "count": len(pairs),
        "pairs": [list(p.as_strings()) for p in pairs],
    }
    cache_file.write_text(json.dumps(payload))
    return pairs
