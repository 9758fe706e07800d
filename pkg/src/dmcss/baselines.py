"""Comparison schemes (LoRa, SSK-ICS-LoRa, GCSS, DCRK-CSS, ePSK-LoRa) and the
scheme registry used by the simulation harness.

Every scheme maps a bit word to one waveform.  Bit words are MSB-first and
their integer value doubles as the candidate index used by the correlation
receiver, so ``candidate_waveforms(scheme, sf)[i]`` is the waveform of the
word whose value is ``i``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import css_core
from .css_core import Slope, as_sf, pack_bits, roots_of_unity, unpack_bits
from .detectors import detect_dm_css_batch
from .spectral import dft_batch, is_power_of_two


class UnsupportedSchemeError(ValueError):
    """Raised when an operation has no implementation for a scheme."""


class Scheme(str, enum.Enum):
    LORA = "lora"
    DMCSS = "dmcss"
    EPSK = "epsk"
    SSK_ICS = "ssk_ics"
    GCSS = "gcss"
    DCRK = "dcrk"


_DISPLAY = {
    Scheme.LORA: "LoRa",
    Scheme.DMCSS: "DM-CSS",
    Scheme.EPSK: "ePSK-LoRa",
    Scheme.SSK_ICS: "SSK-ICS-LoRa",
    Scheme.GCSS: "GCSS",
    Scheme.DCRK: "DCRK-CSS",
}

_ALIASES = {
    "lora": Scheme.LORA,
    "dmcss": Scheme.DMCSS,
    "epsk": Scheme.EPSK,
    "epsklora": Scheme.EPSK,
    "sskics": Scheme.SSK_ICS,
    "sskicslora": Scheme.SSK_ICS,
    "gcss": Scheme.GCSS,
    "dcrk": Scheme.DCRK,
    "dcrkcss": Scheme.DCRK,
}


@dataclass(frozen=True)
class SchemeId:
    tag: Scheme
    G: int = 2  # GCSS groups
    Mc: int = 8  # DCRK chirp rates
    Nb: int = 2  # ePSK sub-blocks
    Mphi: int = 4  # ePSK phases

    def __post_init__(self):
        object.__setattr__(self, "tag", Scheme(self.tag))
        for name in ("G", "Mc", "Nb", "Mphi"):
            if not is_power_of_two(getattr(self, name)):
                raise ValueError(f"{name} must be a power of two, got {getattr(self, name)}")

    @classmethod
    def parse(cls, text: str) -> "SchemeId":
        key = text.strip().lower().replace("-", "").replace("_", "")
        try:
            return cls(_ALIASES[key])
        except KeyError:
            raise ValueError(f"unknown scheme {text!r}") from None

    @property
    def name(self) -> str:
        return _DISPLAY[self.tag]

    @property
    def key(self) -> str:
        return self.tag.value

    @property
    def has_detector(self) -> bool:
        return self.tag is not Scheme.EPSK

    def check(self, sf) -> None:
        n = as_sf(sf).n
        if self.tag is Scheme.GCSS and (self.G > n // 2):
            raise ValueError(f"GCSS needs G <= N/2, got G={self.G}, N={n}")
        if self.tag is Scheme.EPSK and self.Nb > n // 2:
            raise ValueError(f"ePSK needs Nb <= N/2, got Nb={self.Nb}, N={n}")


LORA = SchemeId(Scheme.LORA)
DMCSS = SchemeId(Scheme.DMCSS)
EPSK = SchemeId(Scheme.EPSK)
SSK_ICS = SchemeId(Scheme.SSK_ICS)
GCSS = SchemeId(Scheme.GCSS)
DCRK = SchemeId(Scheme.DCRK)


def _log2(v: int) -> int:
    return v.bit_length() - 1


def scheme_bits_per_symbol(scheme: SchemeId, sf) -> int:
    sf = as_sf(sf)
    lam = sf.lam
    tag = scheme.tag
    if tag is Scheme.LORA:
        return lam
    if tag is Scheme.DMCSS:
        return 2 * lam + 1
    if tag is Scheme.EPSK:
        return _log2(sf.n // scheme.Nb) + scheme.Nb * _log2(scheme.Mphi)
    if tag is Scheme.SSK_ICS:
        return lam + 2
    if tag is Scheme.GCSS:
        return scheme.G * _log2(sf.n // scheme.G)
    if tag is Scheme.DCRK:
        return lam + _log2(scheme.Mc)
    raise UnsupportedSchemeError(tag)


def nominal_symbol_energy(scheme: SchemeId, sf) -> float:
    """Total energy ``sum |s(n)|**2`` of one transmitted symbol (N times its average power)."""
    n = as_sf(sf).n
    tones_per_symbol = {
        Scheme.DMCSS: 2,
        Scheme.GCSS: scheme.G,
        Scheme.EPSK: scheme.Nb,
    }.get(scheme.tag, 1)
    return float(n * tones_per_symbol)


def spectral_efficiency(scheme: SchemeId, sf) -> Fraction:
    """Bits per second per hertz, ``bits_per_symbol / N``, as an exact fraction."""
    sf = as_sf(sf)
    return Fraction(scheme_bits_per_symbol(scheme, sf), sf.n)


# --- symbols ---------------------------------------------------------------


class SskVariant(enum.IntEnum):
    UP = 0
    DOWN = 1
    INTERLEAVED_UP = 2
    INTERLEAVED_DOWN = 3

    @property
    def slope(self) -> Slope:
        return Slope.DOWN if self in (SskVariant.DOWN, SskVariant.INTERLEAVED_DOWN) else Slope.UP

    @property
    def interleaved(self) -> bool:
        return self >= SskVariant.INTERLEAVED_UP


@dataclass(frozen=True)
class BaselineSymbol:
    """One symbol of a comparison scheme.

    ``k`` is the primary bin.  Only the extras relevant to ``scheme`` are set:
    ``variant`` (SSK-ICS), ``bins`` (all GCSS group bins, ``bins[0] == k``),
    ``rate`` (DCRK rate index) and ``phases`` (ePSK, one per sub-block).
    """

    scheme: SchemeId
    k: int
    variant: SskVariant | None = None
    bins: tuple[int, ...] = field(default=())
    rate: int | None = None
    phases: tuple[int, ...] = field(default=())


def _check_range(name: str, v: int, lo: int, hi: int) -> None:
    if not lo <= v <= hi:
        raise ValueError(f"{name}={v} outside [{lo}, {hi}]")


# --- LoRa ------------------------------------------------------------------


def lora_waveforms(k, sf, slope=Slope.UP) -> np.ndarray:
    """``exp(j 2pi/N n (k +- n))`` rows for an array of bins ``k``."""
    n = as_sf(sf).n
    t = np.arange(n, dtype=np.int64)
    k = np.asarray(k, dtype=np.int64)
    sign = np.where(np.asarray(slope)[..., None] == Slope.DOWN, -1, 1)
    return roots_of_unity(n)[(k[..., None] * t + sign * t * t) % n]


def modulate_lora(k: int, sf) -> np.ndarray:
    n = as_sf(sf).n
    _check_range("k", k, 0, n - 1)
    return lora_waveforms(np.array([k]), sf)[0]


def detect_lora(r, sf, dft=dft_batch):
    """Dechirp with the down-chirp and pick the strongest bin; batch-aware."""
    spec = dft(np.asarray(r) * css_core.down_chirp(sf))
    idx = np.abs(spec).argmax(axis=-1)
    return int(idx) if np.ndim(idx) == 0 else idx


# --- SSK-ICS-LoRa ----------------------------------------------------------


def interleaver_shape(sf) -> tuple[int, int]:
    """(rows, cols) of the block interleaver: ``2**ceil(lam/2) x 2**floor(lam/2)``."""
    lam = as_sf(sf).lam
    return 1 << ((lam + 1) // 2), 1 << (lam // 2)


def interleave(x, sf) -> np.ndarray:
    """Write row-wise into the block, read column-wise (last axis)."""
    rows, cols = interleaver_shape(sf)
    x = np.asarray(x)
    lead = x.shape[:-1]
    return np.swapaxes(x.reshape(*lead, rows, cols), -1, -2).reshape(*lead, rows * cols)


def deinterleave(x, sf) -> np.ndarray:
    rows, cols = interleaver_shape(sf)
    x = np.asarray(x)
    lead = x.shape[:-1]
    return np.swapaxes(x.reshape(*lead, cols, rows), -1, -2).reshape(*lead, rows * cols)


def ssk_ics_waveforms(variant, k, sf) -> np.ndarray:
    variant = np.asarray(variant, dtype=np.int64)
    slope = np.where(
        (variant == SskVariant.DOWN) | (variant == SskVariant.INTERLEAVED_DOWN),
        int(Slope.DOWN), int(Slope.UP),
    )
    s = lora_waveforms(k, sf, slope)
    inter = variant >= SskVariant.INTERLEAVED_UP
    if np.any(inter):
        s[inter] = interleave(s[inter], sf)
    return s


def modulate_ssk_ics(sym: BaselineSymbol, sf) -> np.ndarray:
    n = as_sf(sf).n
    if sym.variant is None:
        raise ValueError("SSK-ICS symbol needs a variant")
    _check_range("k", sym.k, 0, n - 1)
    return ssk_ics_waveforms(np.array([int(sym.variant)]), np.array([sym.k]), sf)[0]


def _ssk_ics_metrics(r, sf, dft) -> np.ndarray:
    # |<r, candidate>| for all 4N candidates, variant-major.  Correlating
    # with an interleaved candidate equals correlating the de-interleaved
    # input with the plain chirp, so four spectra cover the whole set.
    r = np.atleast_2d(np.asarray(r))
    plain = r
    deint = deinterleave(r, sf)
    cu = css_core.up_chirp(sf)
    cd = css_core.down_chirp(sf)
    m = np.stack(
        [dft(plain * cd), dft(plain * cu), dft(deint * cd), dft(deint * cu)], axis=1
    )
    return np.abs(m)


def detect_ssk_ics_batch(r, sf, dft=dft_batch):
    """``(variant, k)`` arrays; exact non-coherent ML over all ``4N`` waveforms."""
    n = as_sf(sf).n
    metric = _ssk_ics_metrics(r, sf, dft).reshape(-1, 4 * n)
    idx = metric.argmax(axis=1)
    return idx // n, idx % n


def detect_ssk_ics(r, sf) -> BaselineSymbol:
    variant, k = detect_ssk_ics_batch(np.asarray(r)[None, :], sf)
    return BaselineSymbol(SSK_ICS, int(k[0]), variant=SskVariant(int(variant[0])))


# --- GCSS ------------------------------------------------------------------


def gcss_group_range(i: int, G: int, sf) -> tuple[int, int]:
    """Inclusive bin range of group ``i`` (0-based)."""
    width = as_sf(sf).n // G
    return i * width, (i + 1) * width - 1


def gcss_waveforms(bins, sf) -> np.ndarray:
    """Sum of up-chirped tones; ``bins`` has shape ``(B, G)``."""
    bins = np.asarray(bins, dtype=np.int64)
    return lora_waveforms(bins, sf).sum(axis=-2)


def modulate_gcss(sym: BaselineSymbol, sf) -> np.ndarray:
    G = sym.scheme.G
    if len(sym.bins) != G:
        raise ValueError(f"GCSS symbol needs {G} bins, got {len(sym.bins)}")
    for i, b in enumerate(sym.bins):
        lo, hi = gcss_group_range(i, G, sf)
        _check_range(f"k_{i + 1}", b, lo, hi)
    return gcss_waveforms(np.array([sym.bins]), sf)[0]


def detect_gcss_batch(r, sf, G: int = 2, dft=dft_batch) -> np.ndarray:
    """Per-group argmax of the dechirped spectrum; returns ``(B, G)`` bins."""
    n = as_sf(sf).n
    r = np.atleast_2d(np.asarray(r))
    mag = np.abs(dft(r * css_core.down_chirp(sf))).reshape(-1, G, n // G)
    return mag.argmax(axis=-1) + (n // G) * np.arange(G)


def detect_gcss(r, sf, scheme: SchemeId = GCSS) -> BaselineSymbol:
    bins = detect_gcss_batch(np.asarray(r)[None, :], sf, scheme.G)[0]
    return BaselineSymbol(scheme, int(bins[0]), bins=tuple(int(b) for b in bins))


# --- DCRK-CSS --------------------------------------------------------------


def dcrk_rates(Mc: int) -> np.ndarray:
    """Chirp-rate multipliers; rate 2 is the plain LoRa up-chirp."""
    return np.arange(1, Mc + 1, dtype=np.int64)


def _rate_chirps(n: int, Mc: int) -> np.ndarray:
    # exp(j pi rho n^2 / N) = roots_{2N}[rho n^2 mod 2N], shape (Mc, N)
    t = np.arange(n, dtype=np.int64)
    return roots_of_unity(2 * n)[(dcrk_rates(Mc)[:, None] * t * t) % (2 * n)]


def dcrk_waveforms(m, k, sf, Mc: int = 8) -> np.ndarray:
    """``exp(j pi/N n (2k + rho_m n))`` for arrays of rate indices and bins."""
    n = as_sf(sf).n
    t = np.arange(n, dtype=np.int64)
    rho = dcrk_rates(Mc)[np.asarray(m, dtype=np.int64)]
    k = np.asarray(k, dtype=np.int64)
    return roots_of_unity(2 * n)[(t * (2 * k[..., None] + rho[..., None] * t)) % (2 * n)]


def modulate_dcrk(sym: BaselineSymbol, sf) -> np.ndarray:
    n = as_sf(sf).n
    Mc = sym.scheme.Mc
    if sym.rate is None:
        raise ValueError("DCRK symbol needs a rate index")
    _check_range("k", sym.k, 0, n - 1)
    _check_range("rate", sym.rate, 0, Mc - 1)
    return dcrk_waveforms(np.array([sym.rate]), np.array([sym.k]), sf, Mc)[0]


def detect_dcrk_batch(r, sf, Mc: int = 8, dft=dft_batch):
    """Dechirp against every rate and take the global peak; returns ``(m, k)`` arrays."""
    n = as_sf(sf).n
    r = np.atleast_2d(np.asarray(r))
    spec = dft(r[:, None, :] * _rate_chirps(n, Mc).conj())
    idx = np.abs(spec).reshape(-1, Mc * n).argmax(axis=1)
    return idx // n, idx % n


def detect_dcrk(r, sf, scheme: SchemeId = DCRK) -> BaselineSymbol:
    m, k = detect_dcrk_batch(np.asarray(r)[None, :], sf, scheme.Mc)
    return BaselineSymbol(scheme, int(k[0]), rate=int(m[0]))


# --- ePSK-LoRa (modulator only) ---------------------------------------------


def epsk_waveforms(k, phases, sf, Nb: int = 2, Mphi: int = 4) -> np.ndarray:
    """Sum over sub-blocks l = 1..Nb of
    ``exp(j 2pi (k n/N + l n/Nb + p_l/Mphi + n^2/N))``; ``phases`` is ``(B, Nb)``.
    """
    n = as_sf(sf).n
    t = np.arange(n, dtype=np.int64)
    k = np.asarray(k, dtype=np.int64)[:, None, None]
    p = np.asarray(phases, dtype=np.int64)[:, :, None]
    l = np.arange(1, Nb + 1, dtype=np.int64)[None, :, None]
    # common denominator N * Mphi keeps the phase index an exact integer
    num = (k * t + l * t * (n // Nb) + t * t) * Mphi + p * n
    return roots_of_unity(n * Mphi)[num % (n * Mphi)].sum(axis=1)


def modulate_epsk(sym: BaselineSymbol, sf) -> np.ndarray:
    n = as_sf(sf).n
    Nb, Mphi = sym.scheme.Nb, sym.scheme.Mphi
    if len(sym.phases) != Nb:
        raise ValueError(f"ePSK symbol needs {Nb} phases, got {len(sym.phases)}")
    _check_range("k", sym.k, 0, n // Nb - 1)
    for i, p in enumerate(sym.phases):
        _check_range(f"p_{i + 1}", p, 0, Mphi - 1)
    return epsk_waveforms(np.array([sym.k]), np.array([sym.phases]), sf, Nb, Mphi)[0]


# --- bit-level registry ----------------------------------------------------


def bit_fields(scheme: SchemeId, sf) -> dict[str, slice]:
    """Named bit ranges of a word, used for per-field error diagnostics."""
    sf = as_sf(sf)
    lam = sf.lam
    tag = scheme.tag
    if tag is Scheme.LORA:
        return {"k": slice(0, lam)}
    if tag is Scheme.DMCSS:
        return {
            "slope": slice(0, 1),
            "k_e": slice(1, lam),
            "k_o": slice(lam, 2 * lam - 1),
            "alpha_e": slice(2 * lam - 1, 2 * lam),
            "alpha_o": slice(2 * lam, 2 * lam + 1),
        }
    if tag is Scheme.SSK_ICS:
        return {"variant": slice(0, 2), "k": slice(2, lam + 2)}
    if tag is Scheme.GCSS:
        w = _log2(sf.n // scheme.G)
        return {f"k_{i + 1}": slice(i * w, (i + 1) * w) for i in range(scheme.G)}
    if tag is Scheme.DCRK:
        w = _log2(scheme.Mc)
        return {"rate": slice(0, w), "k": slice(w, w + lam)}
    if tag is Scheme.EPSK:
        w = _log2(sf.n // scheme.Nb)
        q = _log2(scheme.Mphi)
        out = {"k": slice(0, w)}
        for i in range(scheme.Nb):
            out[f"p_{i + 1}"] = slice(w + i * q, w + (i + 1) * q)
        return out
    raise UnsupportedSchemeError(tag)


def _field_values(scheme, bits, sf) -> dict[str, np.ndarray]:
    return {name: pack_bits(bits[:, s]) for name, s in bit_fields(scheme, sf).items()}


def modulate_bits(scheme: SchemeId, bits, sf) -> np.ndarray:
    """Waveforms for a ``(B, bits_per_symbol)`` array of bit words."""
    sf = as_sf(sf)
    scheme.check(sf)
    bits = np.asarray(bits)
    width = scheme_bits_per_symbol(scheme, sf)
    if bits.ndim != 2 or bits.shape[1] != width:
        raise ValueError(f"{scheme.name} needs {width}-bit words, got shape {bits.shape}")
    tag = scheme.tag
    if tag is Scheme.DMCSS:
        return css_core.modulate_fields(*css_core.bits_to_fields(bits, sf), sf)
    f = _field_values(scheme, bits, sf)
    if tag is Scheme.LORA:
        return lora_waveforms(f["k"], sf)
    if tag is Scheme.SSK_ICS:
        return ssk_ics_waveforms(f["variant"], f["k"], sf)
    if tag is Scheme.GCSS:
        width = sf.n // scheme.G
        bins = np.stack([f[f"k_{i + 1}"] + i * width for i in range(scheme.G)], axis=1)
        return gcss_waveforms(bins, sf)
    if tag is Scheme.DCRK:
        return dcrk_waveforms(f["rate"], f["k"], sf, scheme.Mc)
    if tag is Scheme.EPSK:
        phases = np.stack([f[f"p_{i + 1}"] for i in range(scheme.Nb)], axis=1)
        return epsk_waveforms(f["k"], phases, sf, scheme.Nb, scheme.Mphi)
    raise UnsupportedSchemeError(tag)


def detect_bits(scheme: SchemeId, r, sf, dft=dft_batch) -> np.ndarray:
    """Detected bit words for a ``(B, N)`` block of received symbols."""
    sf = as_sf(sf)
    r = np.atleast_2d(np.asarray(r))
    tag = scheme.tag
    if tag is Scheme.DMCSS:
        d = detect_dm_css_batch(r, sf, dft)
        return css_core.fields_to_bits(d.slope, d.k_e, d.k_o, d.alpha_e, d.alpha_o, sf)
    if tag is Scheme.LORA:
        return unpack_bits(detect_lora(r, sf, dft), sf.lam)
    if tag is Scheme.SSK_ICS:
        variant, k = detect_ssk_ics_batch(r, sf, dft)
        return unpack_bits(variant * sf.n + k, sf.lam + 2)
    if tag is Scheme.GCSS:
        width = sf.n // scheme.G
        w = _log2(width)
        bins = detect_gcss_batch(r, sf, scheme.G, dft) % width
        return unpack_bits(bins, w).reshape(r.shape[0], scheme.G * w)
    if tag is Scheme.DCRK:
        m, k = detect_dcrk_batch(r, sf, scheme.Mc, dft)
        return unpack_bits(m * sf.n + k, scheme_bits_per_symbol(scheme, sf))
    raise UnsupportedSchemeError(
        f"{scheme.name} has no non-coherent detector (its phase bits need coherent detection)"
    )


@lru_cache(maxsize=32)
def candidate_waveforms(scheme: SchemeId, sf) -> np.ndarray:
    """Every waveform of ``scheme`` indexed by bit-word value; read-only."""
    sf = as_sf(sf)
    width = scheme_bits_per_symbol(scheme, sf)
    if width > 20:
        raise ValueError(f"{scheme.name} at lam={sf.lam} has 2**{width} waveforms; too many")
    table = modulate_bits(scheme, unpack_bits(np.arange(1 << width), width), sf)
    table.setflags(write=False)
    return table
