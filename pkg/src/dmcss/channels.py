"""Channel impairments: 2-tap fading, phase offset, carrier frequency offset, AWGN.

All functions act on the last axis, so a ``(B, N)`` block is B independent
symbols.  Fading starts from a zero state in every symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class ChannelSpec:
    """Impairment settings; ``delta_f`` is in bins (cycles per symbol)."""

    ebn0_db: float = math.inf
    rho: float = 0.0
    psi: float = 0.0
    delta_f: float = 0.0
    fading_enabled: bool = False

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if not math.isfinite(self.delta_f):
            raise ValueError("delta_f must be finite")
        if not math.isfinite(self.psi):
            raise ValueError("psi must be finite")
        if math.isnan(self.ebn0_db) or self.ebn0_db == -math.inf:
            raise ValueError(f"invalid Eb/N0 {self.ebn0_db}")

    def at(self, ebn0_db: float) -> "ChannelSpec":
        return replace(self, ebn0_db=float(ebn0_db))


def sigma_for_ebn0(ebn0_db: float, symbol_energy_total: float, bits_per_symbol: int) -> float:
    """Per-sample complex noise variance giving the requested Eb/N0.

    ``symbol_energy_total`` is ``sum |s(n)|**2`` over one symbol, so
    ``Eb = symbol_energy_total / bits_per_symbol`` and ``N0 = sigma**2``.
    """
    if symbol_energy_total <= 0:
        raise ValueError(f"symbol energy must be positive, got {symbol_energy_total}")
    if bits_per_symbol < 1:
        raise ValueError(f"bits_per_symbol must be >= 1, got {bits_per_symbol}")
    if ebn0_db == math.inf:
        return 0.0
    return symbol_energy_total / bits_per_symbol / 10.0 ** (ebn0_db / 10.0)


def apply_awgn(s, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Add circular complex Gaussian noise of total variance ``sigma2`` per sample."""
    s = np.asarray(s)
    if sigma2 < 0:
        raise ValueError(f"noise variance must be non-negative, got {sigma2}")
    if sigma2 == 0:
        return s.astype(np.complex128, copy=True)
    noise = rng.standard_normal(s.shape + (2,)).view(np.complex128)[..., 0]
    return s + math.sqrt(sigma2 / 2.0) * noise


def apply_fading(s, rho: float) -> np.ndarray:
    """``sqrt(1-rho) s(n) + sqrt(rho) s(n-1)`` with ``s(-1) = 0``."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    s = np.asarray(s, dtype=np.complex128)
    out = math.sqrt(1.0 - rho) * s
    out[..., 1:] += math.sqrt(rho) * s[..., :-1]
    return out


def apply_phase_offset(s, psi: float) -> np.ndarray:
    return np.asarray(s) * complex(math.cos(psi), math.sin(psi))


def apply_freq_offset(s, delta_f: float) -> np.ndarray:
    """Rotate sample ``n`` by ``exp(j 2 pi delta_f n / N)``."""
    s = np.asarray(s)
    n = s.shape[-1]
    return s * np.exp(2j * np.pi * delta_f * np.arange(n) / n)


def apply_impairments(s, spec: ChannelSpec) -> np.ndarray:
    """Deterministic part of the chain: fading, then phase offset, then frequency offset."""
    out = np.asarray(s, dtype=np.complex128)
    if spec.fading_enabled and spec.rho:
        out = apply_fading(out, spec.rho)
    if spec.psi:
        out = apply_phase_offset(out, spec.psi)
    if spec.delta_f:
        out = apply_freq_offset(out, spec.delta_f)
    return out


def apply_channel(s, spec: ChannelSpec, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    return apply_awgn(apply_impairments(s, spec), sigma2, rng)
