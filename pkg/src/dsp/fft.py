import functools

import numpy as np

from utils import LabError
from const import T_NotPowerOfTwo


class NotPowerOfTwo(LabError):
    def __init__(self, n):
        self.n = n

    def __str__(self):
        return T_NotPowerOfTwo.format(self.n)


def is_pow2(n):
    return n >= 1 and n & (n - 1) == 0


def next_pow2(n):
    """Smallest power of two >= n"""
    p = 1
    while p < n:
        p <<= 1
    return p


@functools.lru_cache(maxsize=32)
def _bit_reversal(n):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@functools.lru_cache(maxsize=64)
def _twiddles(size):
    return np.exp(-2j * np.pi * np.arange(size // 2) / size)


def fft(buffer):
    """Iterative radix-2 decimation-in-time transform over the last axis"""
    x = np.asarray(buffer, dtype=np.complex128)
    n = x.shape[-1]
    if not is_pow2(n):
        raise NotPowerOfTwo(n)

    lead = x.shape[:-1]
    y = x[..., _bit_reversal(n)]
    size = 2
    while size <= n:
        half = size // 2
        y = y.reshape(lead + (n // size, size))
        even = y[..., :half]
        odd = y[..., half:] * _twiddles(size)
        y = np.concatenate([even + odd, even - odd], axis=-1)
        size *= 2
    return y.reshape(lead + (n,))


def ifft(spectrum):
    X = np.asarray(spectrum, dtype=np.complex128)
    return np.conj(fft(np.conj(X))) / X.shape[-1]


def dft(buffer):
    """O(n^2) transform by definition, for checking the fast path"""
    x = np.asarray(buffer, dtype=np.complex128)
    n = x.shape[-1]
    k = np.arange(n)
    return x @ np.exp(-2j * np.pi * np.outer(k, k) / n)
