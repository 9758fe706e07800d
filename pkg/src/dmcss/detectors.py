"""Non-coherent DM-CSS detection and the brute-force correlation receiver."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .css_core import DmCssSymbol, Slope, as_sf, chirp
from .spectral import dft_batch, dft_fast


@dataclass(frozen=True)
class DetectionResult:
    symbol: DmCssSymbol
    kappa1: float  # peak |R1|, up-chirp removed
    kappa2: float  # peak |R2|, down-chirp removed


class DmCssDecisions(NamedTuple):
    slope: np.ndarray
    k_e: np.ndarray
    k_o: np.ndarray
    alpha_e: np.ndarray
    alpha_o: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray


def _check_len(r: np.ndarray, n: int) -> None:
    if r.shape[-1] != n:
        raise ValueError(f"received buffer has length {r.shape[-1]}, expected N={n}")


def dechirp(r, slope: Slope, sf) -> np.ndarray:
    """Strip a chirp of direction ``slope`` from ``r`` (multiply by its conjugate)."""
    sf = as_sf(sf)
    r = np.asarray(r)
    _check_len(r, sf.n)
    return r * chirp(sf, Slope(slope).flipped())


def branch_spectra(r, sf, dft=dft_batch):
    """``(R1, R2)``: spectra after removing an up-chirp and a down-chirp."""
    return dft(dechirp(r, Slope.UP, sf)), dft(dechirp(r, Slope.DOWN, sf))


def detect_dm_css_batch(r, sf, dft=dft_batch) -> DmCssDecisions:
    """Detect a ``(B, N)`` block of received symbols.

    Ties resolve deterministically: ``kappa1 == kappa2`` decides an
    up-chirp, equal bin magnitudes pick the lowest bin, and a zero real
    part decides ``+1``.
    """
    r = np.atleast_2d(np.asarray(r))
    R1, R2 = branch_spectra(r, sf, dft)
    A1 = np.abs(R1)
    A2 = np.abs(R2)
    kappa1 = A1.max(axis=1)
    kappa2 = A2.max(axis=1)
    up = kappa1 >= kappa2
    R = np.where(up[:, None], R1, R2)
    A = np.where(up[:, None], A1, A2)
    k_e = 2 * A[:, 0::2].argmax(axis=1)
    k_o = 2 * A[:, 1::2].argmax(axis=1) + 1
    rows = np.arange(r.shape[0])
    alpha_e = np.where(R[rows, k_e].real < 0, -1, 1)
    alpha_o = np.where(R[rows, k_o].real < 0, -1, 1)
    slope = np.where(up, int(Slope.UP), int(Slope.DOWN))
    return DmCssDecisions(slope, k_e, k_o, alpha_e, alpha_o, kappa1, kappa2)


def detect_dm_css(r, sf) -> DetectionResult:
    sf = as_sf(sf)
    r = np.asarray(r)
    _check_len(r, sf.n)
    d = detect_dm_css_batch(r[None, :], sf, dft=dft_fast)
    sym = DmCssSymbol(
        int(d.k_e[0]), int(d.k_o[0]), int(d.alpha_e[0]), int(d.alpha_o[0]),
        Slope(int(d.slope[0])),
    )
    return DetectionResult(sym, float(d.kappa1[0]), float(d.kappa2[0]))


def correlation_metrics(r, candidates) -> np.ndarray:
    """``|<r, c_m>|`` for every candidate row; shape ``(B, M)`` for ``(B, N)`` input."""
    c = np.asarray(candidates)
    if c.ndim != 2 or c.shape[0] == 0:
        raise ValueError("candidate set must be a non-empty (M, N) array")
    r = np.asarray(r)
    if r.shape[-1] != c.shape[1]:
        raise ValueError(
            f"candidate length {c.shape[1]} does not match received length {r.shape[-1]}"
        )
    return np.abs(r @ c.conj().T)


def correlation_detect(r, candidates):
    """Index of the candidate with the largest ``|<r, c>|``; ties go to the lowest index.

    ``r`` may be one buffer (returns an int) or a ``(B, N)`` block (returns
    an index array).
    """
    m = correlation_metrics(r, candidates)
    idx = m.argmax(axis=-1)
    return int(idx) if np.ndim(idx) == 0 else idx
