"""Forward DFT, unnormalised: ``X[k] = sum_n x[n] exp(-j 2 pi k n / N)``.

Three routes to the same transform:

* :func:`dft_fast` -- iterative radix-2 decimation-in-time FFT, twiddles cached per N.
* :func:`dft_reference` -- direct O(N^2) summation, kept as the test oracle.
* :func:`dft_batch` -- numpy's pocketfft; used in Monte Carlo loops where
  throughput matters. Tests tie it to the other two.

All three transform along the last axis.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _check_length(n: int) -> None:
    if not is_power_of_two(n):
        raise ValueError(f"DFT length must be a power of two, got {n}")


@lru_cache(maxsize=None)
def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.intp)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.setflags(write=False)
    return rev


@lru_cache(maxsize=None)
def _twiddles(n: int) -> tuple[np.ndarray, ...]:
    # stage s (span m = 2**(s+1)) uses exp(-j 2 pi i / m), i < m/2
    out = []
    m = 2
    while m <= n:
        w = np.exp(-2j * np.pi * np.arange(m // 2) / m)
        w.setflags(write=False)
        out.append(w)
        m <<= 1
    return tuple(out)


def dft_fast(buf) -> np.ndarray:
    """Radix-2 FFT of ``buf`` along its last axis."""
    x = np.asarray(buf, dtype=np.complex128)
    n = x.shape[-1]
    _check_length(n)
    lead = x.shape[:-1]
    a = x.reshape(-1, n)[:, _bit_reversal(n)]
    rows = a.shape[0]
    b = np.empty_like(a)
    tmp = np.empty((rows, n // 2), dtype=np.complex128)
    m = 2
    for w in _twiddles(n):
        h = m // 2
        av = a.reshape(rows, n // m, 2, h)
        bv = b.reshape(rows, n // m, 2, h)
        tv = tmp.reshape(rows, n // m, h)
        np.multiply(av[:, :, 1, :], w, out=tv)
        np.add(av[:, :, 0, :], tv, out=bv[:, :, 0, :])
        np.subtract(av[:, :, 0, :], tv, out=bv[:, :, 1, :])
        a, b = b, a
        m <<= 1
    return a.reshape(*lead, n)


def dft_reference(buf, chunk: int = 256) -> np.ndarray:
    """Direct O(N^2) evaluation of the DFT sum (any length)."""
    x = np.asarray(buf, dtype=np.complex128)
    n = x.shape[-1]
    t = np.arange(n, dtype=np.int64)
    out = np.empty(x.shape, dtype=np.complex128)
    for k0 in range(0, n, chunk):
        k = np.arange(k0, min(k0 + chunk, n), dtype=np.int64)
        # reduce k*t mod n before scaling so large N keeps full phase accuracy
        kernel = np.exp(-2j * np.pi * ((k[:, None] * t) % n) / n)
        out[..., k0:k0 + len(k)] = x @ kernel.T
    return out


def dft_batch(buf) -> np.ndarray:
    x = np.asarray(buf)
    _check_length(x.shape[-1])
    return np.fft.fft(x, axis=-1)
