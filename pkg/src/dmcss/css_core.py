"""DM-CSS symbols, chirps and waveform synthesis.

Waveforms are plain ``complex128`` numpy arrays of length ``N``.  Every
phase of the form ``exp(j*2*pi*m/N)`` with integer ``m`` is computed by
indexing a table of the N-th roots of unity with ``m mod N``, so chirps
and tones are exact to the last ulp of the table and do not lose accuracy
as ``n**2`` grows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MIN_LAMBDA = 2
MAX_LAMBDA = 16


class Slope(enum.IntEnum):
    UP = 0
    DOWN = 1

    def flipped(self) -> "Slope":
        return Slope.DOWN if self is Slope.UP else Slope.UP


@dataclass(frozen=True)
class SpreadingFactor:
    """Spreading factor ``lam``; a symbol spans ``n = 2**lam`` samples."""

    lam: int

    def __post_init__(self):
        if isinstance(self.lam, bool) or not isinstance(self.lam, (int, np.integer)):
            raise TypeError(f"spreading factor must be an integer, got {self.lam!r}")
        if not MIN_LAMBDA <= self.lam <= MAX_LAMBDA:
            raise ValueError(
                f"spreading factor must be in [{MIN_LAMBDA}, {MAX_LAMBDA}], got {self.lam}"
            )
        object.__setattr__(self, "lam", int(self.lam))

    @property
    def n(self) -> int:
        return 1 << self.lam


def as_sf(sf) -> SpreadingFactor:
    return sf if isinstance(sf, SpreadingFactor) else SpreadingFactor(sf)


@dataclass(frozen=True)
class DmCssSymbol:
    k_e: int
    k_o: int
    alpha_e: int
    alpha_o: int
    slope: Slope = Slope.UP

    def __post_init__(self):
        for name in ("k_e", "k_o", "alpha_e", "alpha_o"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.k_e < 0 or self.k_e % 2:
            raise ValueError(f"k_e must be a non-negative even bin, got {self.k_e}")
        if self.k_o < 1 or self.k_o % 2 == 0:
            raise ValueError(f"k_o must be a positive odd bin, got {self.k_o}")
        if self.alpha_e not in (1, -1) or self.alpha_o not in (1, -1):
            raise ValueError(
                f"phase signs must be +1 or -1, got ({self.alpha_e}, {self.alpha_o})"
            )
        object.__setattr__(self, "slope", Slope(self.slope))

    def check(self, sf) -> None:
        """Raise ``ValueError`` unless both tones fit in ``sf``."""
        n = as_sf(sf).n
        if self.k_e > n - 2:
            raise ValueError(f"k_e={self.k_e} out of range for N={n}")
        if self.k_o > n - 1:
            raise ValueError(f"k_o={self.k_o} out of range for N={n}")


def bits_per_symbol(sf) -> int:
    return 2 * as_sf(sf).lam + 1


# --- phase tables ----------------------------------------------------------


@lru_cache(maxsize=None)
def roots_of_unity(m: int) -> np.ndarray:
    """``exp(j*2*pi*i/m)`` for ``i`` in ``[0, m)``; read-only, cached per m."""
    table = np.exp(2j * np.pi * np.arange(m) / m)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _chirp(n: int, slope: Slope) -> np.ndarray:
    idx = np.arange(n, dtype=np.int64)
    sq = (idx * idx) % n
    if slope is Slope.DOWN:
        sq = (-sq) % n
    c = roots_of_unity(n)[sq]
    c.setflags(write=False)
    return c


def up_chirp(sf) -> np.ndarray:
    """``exp(j*2*pi*n**2/N)`` for ``n = 0..N-1``."""
    return _chirp(as_sf(sf).n, Slope.UP)


def down_chirp(sf) -> np.ndarray:
    """``exp(-j*2*pi*n**2/N)`` for ``n = 0..N-1``."""
    return _chirp(as_sf(sf).n, Slope.DOWN)


def chirp(sf, slope: Slope) -> np.ndarray:
    return _chirp(as_sf(sf).n, Slope(slope))


def tones(k, n: int) -> np.ndarray:
    """Rows ``exp(j*2*pi*k*t/N)`` for each integer ``k`` (any shape); shape ``k.shape + (n,)``."""
    k = np.asarray(k, dtype=np.int64)
    t = np.arange(n, dtype=np.int64)
    return roots_of_unity(n)[(k[..., None] * t) % n]


# --- waveforms -------------------------------------------------------------


def unchirped_symbol(sym: DmCssSymbol, sf) -> np.ndarray:
    sf = as_sf(sf)
    sym.check(sf)
    return sym.alpha_e * tones(sym.k_e, sf.n) + sym.alpha_o * tones(sym.k_o, sf.n)


def modulate(sym: DmCssSymbol, sf) -> np.ndarray:
    """Chirped DM-CSS waveform: the two signed tones times the up- or down-chirp."""
    sf = as_sf(sf)
    return unchirped_symbol(sym, sf) * chirp(sf, sym.slope)


def modulate_fields(slope, k_e, k_o, alpha_e, alpha_o, sf) -> np.ndarray:
    """Vectorised :func:`modulate` over equal-length field arrays; returns ``(B, N)``.

    No range validation: callers in the simulation loop build the fields
    from :func:`bits_to_fields`, which cannot produce invalid values.
    """
    n = as_sf(sf).n
    t = np.arange(n, dtype=np.int64)
    sign = np.where(np.asarray(slope)[:, None] == Slope.DOWN, -1, 1)
    sq = sign * (t * t)
    roots = roots_of_unity(n)
    k_e = np.asarray(k_e, dtype=np.int64)[:, None]
    k_o = np.asarray(k_o, dtype=np.int64)[:, None]
    out = roots[(k_e * t + sq) % n]
    out *= np.asarray(alpha_e)[:, None]
    out += np.asarray(alpha_o)[:, None] * roots[(k_o * t + sq) % n]
    return out


def symbol_energy(buf) -> float:
    """Average power ``(1/N) * sum |s(n)|**2``."""
    buf = np.asarray(buf)
    if buf.size == 0:
        raise ValueError("symbol_energy of an empty buffer")
    return float(np.mean(buf.real ** 2 + buf.imag ** 2))


def inner_product(a, b) -> complex:
    """``sum a(n) * conj(b(n))``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return complex(np.sum(a * np.conj(b)))


# --- bit mapping -----------------------------------------------------------
#
# word layout (2*lam + 1 bits):
#   [0]              slope        0 -> up, 1 -> down
#   [1 .. lam-1]     k_e / 2      natural binary, MSB first
#   [lam .. 2lam-2]  (k_o - 1)/2  natural binary, MSB first
#   [2lam - 1]       alpha_e      0 -> +1, 1 -> -1
#   [2lam]           alpha_o


def pack_bits(bits) -> np.ndarray:
    """MSB-first integer value of each row of ``bits`` (last axis)."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape[-1] == 0:
        return np.zeros(bits.shape[:-1], dtype=np.int64)
    weights = 1 << np.arange(bits.shape[-1] - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def unpack_bits(values, width: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; shape ``values.shape + (width,)``, dtype uint8."""
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((values[..., None] >> shifts) & 1).astype(np.uint8)


def _as_word(bits, width: int) -> np.ndarray:
    if isinstance(bits, str):
        bits = [int(c) for c in bits]
    arr = np.asarray(bits)
    if arr.ndim != 1 or arr.shape[0] != width:
        raise ValueError(f"expected a {width}-bit word, got shape {arr.shape}")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bit words may only contain 0 and 1")
    return arr.astype(np.uint8)


def bits_to_fields(bits, sf):
    """Vectorised bit-word decoding; ``bits`` has shape ``(B, 2*lam+1)``.

    Returns ``(slope, k_e, k_o, alpha_e, alpha_o)`` integer arrays.
    """
    lam = as_sf(sf).lam
    bits = np.asarray(bits)
    slope = bits[:, 0].astype(np.int64)
    k_e = 2 * pack_bits(bits[:, 1:lam])
    k_o = 2 * pack_bits(bits[:, lam:2 * lam - 1]) + 1
    alpha_e = 1 - 2 * bits[:, 2 * lam - 1].astype(np.int64)
    alpha_o = 1 - 2 * bits[:, 2 * lam].astype(np.int64)
    return slope, k_e, k_o, alpha_e, alpha_o


def fields_to_bits(slope, k_e, k_o, alpha_e, alpha_o, sf) -> np.ndarray:
    lam = as_sf(sf).lam
    slope = np.asarray(slope, dtype=np.int64)
    out = np.empty((slope.shape[0], 2 * lam + 1), dtype=np.uint8)
    out[:, 0] = slope
    out[:, 1:lam] = unpack_bits(np.asarray(k_e) // 2, lam - 1)
    out[:, lam:2 * lam - 1] = unpack_bits(np.asarray(k_o) // 2, lam - 1)
    out[:, 2 * lam - 1] = np.asarray(alpha_e) < 0
    out[:, 2 * lam] = np.asarray(alpha_o) < 0
    return out


def bits_to_symbol(bits, sf) -> DmCssSymbol:
    sf = as_sf(sf)
    word = _as_word(bits, bits_per_symbol(sf))
    slope, k_e, k_o, a_e, a_o = (int(v[0]) for v in bits_to_fields(word[None, :], sf))
    return DmCssSymbol(k_e, k_o, a_e, a_o, Slope(slope))


def symbol_to_bits(sym: DmCssSymbol, sf) -> np.ndarray:
    sf = as_sf(sf)
    sym.check(sf)
    return fields_to_bits(
        [sym.slope], [sym.k_e], [sym.k_o], [sym.alpha_e], [sym.alpha_o], sf
    )[0]


def all_symbols(sf) -> list[DmCssSymbol]:
    """Every DM-CSS symbol for ``sf``, in bit-word order."""
    sf = as_sf(sf)
    width = bits_per_symbol(sf)
    words = unpack_bits(np.arange(1 << width), width)
    fields = bits_to_fields(words, sf)
    return [
        DmCssSymbol(int(ke), int(ko), int(ae), int(ao), Slope(int(sl)))
        for sl, ke, ko, ae, ao in zip(*fields)
    ]
