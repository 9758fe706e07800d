"""Reproducible Monte Carlo BER experiments.

Trials are processed in fixed blocks of :data:`BLOCK_TRIALS`.  Block ``b`` of
the point at ``ebn0_db`` draws from its own Philox stream keyed by
``(master_seed, bits of ebn0_db, b)``, so results do not depend on how many
worker threads run the blocks or in which order they finish.
"""

from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .baselines import (
    LORA,
    SchemeId,
    UnsupportedSchemeError,
    bit_fields,
    detect_bits,
    modulate_bits,
    nominal_symbol_energy,
    scheme_bits_per_symbol,
    spectral_efficiency,
)
from .channels import ChannelSpec, apply_channel, sigma_for_ebn0
from .css_core import as_sf

BLOCK_TRIALS = 1024
DEFAULT_TRIALS = 200_000


class NoBracketError(ValueError):
    """The BER curve never crosses the target inside the simulated grid."""


@dataclass(frozen=True)
class SweepConfig:
    scheme: SchemeId
    lam: int
    channel: ChannelSpec = field(default_factory=ChannelSpec)
    ebn0_grid: tuple[float, ...] = ()
    trials_per_point: int = DEFAULT_TRIALS
    target_ber: float = 1e-3
    master_seed: int = 0

    def __post_init__(self):
        as_sf(self.lam)
        object.__setattr__(self, "ebn0_grid", tuple(float(x) for x in self.ebn0_grid))
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if any(b <= a for a, b in zip(self.ebn0_grid, self.ebn0_grid[1:])):
            raise ValueError(f"Eb/N0 grid must be strictly increasing: {self.ebn0_grid}")
        if not 0.0 < self.target_ber < 1.0:
            raise ValueError(f"target BER must be in (0, 1), got {self.target_ber}")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class BerPoint:
    ebn0_db: float
    trials: int
    bits_per_symbol: int
    bit_errors: int
    symbol_errors: int
    field_errors: dict[str, int] = field(default_factory=dict, compare=False)

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.trials * self.bits_per_symbol)

    @property
    def ser(self) -> float:
        return self.symbol_errors / self.trials


@dataclass(frozen=True)
class RequiredSnrResult:
    ebn0_db_at_target: float
    lower: BerPoint
    upper: BerPoint
    note: str = "log-linear"


def _point_key(ebn0_db: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(ebn0_db)))[0]


def block_rng(master_seed: int, ebn0_db: float, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence([master_seed, _point_key(ebn0_db), block])
    return np.random.Generator(np.random.Philox(ss))


def _run_block(cfg: SweepConfig, ebn0_db: float, sigma2: float, block: int, size: int):
    sf = as_sf(cfg.lam)
    nbits = scheme_bits_per_symbol(cfg.scheme, sf)
    rng = block_rng(cfg.master_seed, ebn0_db, block)
    bits = rng.integers(0, 2, size=(size, nbits), dtype=np.uint8)
    tx = modulate_bits(cfg.scheme, bits, sf)
    rx = apply_channel(tx, cfg.channel, sigma2, rng)
    wrong = detect_bits(cfg.scheme, rx, sf) != bits
    fields = {name: int(wrong[:, s].sum()) for name, s in bit_fields(cfg.scheme, sf).items()}
    return int(wrong.sum()), int(wrong.any(axis=1).sum()), fields


def run_ber_point(cfg: SweepConfig, ebn0_db: float, threads: int = 1) -> BerPoint:
    """Simulate ``cfg.trials_per_point`` symbols at one Eb/N0.

    ``cfg.channel.ebn0_db`` is ignored; the noise level comes from ``ebn0_db``.
    ``threads`` (0 = one per CPU) affects speed only, never the result.
    """
    if not cfg.scheme.has_detector:
        raise UnsupportedSchemeError(
            f"{cfg.scheme.name} has no non-coherent detector; BER cannot be simulated"
        )
    sf = as_sf(cfg.lam)
    cfg.scheme.check(sf)
    nbits = scheme_bits_per_symbol(cfg.scheme, sf)
    sigma2 = sigma_for_ebn0(ebn0_db, nominal_symbol_energy(cfg.scheme, sf), nbits)
    n_blocks = math.ceil(cfg.trials_per_point / BLOCK_TRIALS)
    sizes = [
        min(BLOCK_TRIALS, cfg.trials_per_point - b * BLOCK_TRIALS) for b in range(n_blocks)
    ]

    def work(b):
        return _run_block(cfg, ebn0_db, sigma2, b, sizes[b])

    if threads == 0:
        threads = os.cpu_count() or 1
    if threads > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, range(n_blocks)))
    else:
        results = [work(b) for b in range(n_blocks)]

    field_errors = dict.fromkeys(bit_fields(cfg.scheme, sf), 0)
    for _, _, fe in results:
        for k, v in fe.items():
            field_errors[k] += v
    return BerPoint(
        ebn0_db=float(ebn0_db),
        trials=cfg.trials_per_point,
        bits_per_symbol=nbits,
        bit_errors=sum(r[0] for r in results),
        symbol_errors=sum(r[1] for r in results),
        field_errors=field_errors,
    )


def run_sweep(cfg: SweepConfig, threads: int = 1) -> list[BerPoint]:
    if not cfg.ebn0_grid:
        raise ValueError("Eb/N0 grid is empty")
    return [run_ber_point(cfg, e, threads) for e in cfg.ebn0_grid]


def required_snr_at_target(points: list[BerPoint], target_ber: float = 1e-3) -> RequiredSnrResult:
    """Eb/N0 at which the BER curve crosses ``target_ber``.

    Interpolates linearly in (dB, log10 BER) between the first pair of
    consecutive points that straddles the target.  If the lower-BER point
    saw no errors at all, falls back to interpolation linear in BER.
    """
    pts = sorted(points, key=lambda p: p.ebn0_db)
    for p in pts:
        if p.ber == target_ber:
            return RequiredSnrResult(p.ebn0_db, p, p, "exact grid hit")
    for lo, hi in zip(pts, pts[1:]):
        if lo.ber > target_ber > hi.ber:
            if hi.ber > 0:
                frac = (math.log10(lo.ber) - math.log10(target_ber)) / (
                    math.log10(lo.ber) - math.log10(hi.ber)
                )
                note = "log-linear"
            else:
                frac = (lo.ber - target_ber) / lo.ber
                note = "linear (upper point has zero errors)"
            x = lo.ebn0_db + frac * (hi.ebn0_db - lo.ebn0_db)
            return RequiredSnrResult(x, lo, hi, note)
    bers = ", ".join(f"{p.ebn0_db:g} dB: {p.ber:.3g}" for p in pts)
    raise NoBracketError(
        f"no pair of points straddles BER {target_ber:g} ({bers}); extend the Eb/N0 grid"
    )


def required_snr(cfg: SweepConfig, threads: int = 1) -> tuple[RequiredSnrResult, list[BerPoint]]:
    points = run_sweep(cfg, threads)
    return required_snr_at_target(points, cfg.target_ber), points


def se_increase_over_lora(scheme: SchemeId, sf) -> Fraction:
    """Absolute SE gain over LoRa in bits/s/Hz."""
    return spectral_efficiency(scheme, sf) - spectral_efficiency(LORA, sf)


def se_relative_increase_percent(scheme: SchemeId, sf) -> float:
    base = spectral_efficiency(LORA, sf)
    return float((spectral_efficiency(scheme, sf) - base) / base * 100)


__all__ = [
    "BLOCK_TRIALS",
    "BerPoint",
    "NoBracketError",
    "RequiredSnrResult",
    "SweepConfig",
    "block_rng",
    "required_snr",
    "required_snr_at_target",
    "run_ber_point",
    "run_sweep",
    "se_increase_over_lora",
    "se_relative_increase_percent",
    "spectral_efficiency",
]
