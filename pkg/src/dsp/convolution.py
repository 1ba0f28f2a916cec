import numpy as np

from dsp.fft import fft, ifft, next_pow2


def fft_convolve(x, h):
    """Full linear convolution through one zero-padded radix-2 transform"""
    x = np.asarray(x, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    length = len(x) + len(h) - 1
    n = next_pow2(length)
    X = fft(np.pad(x, (0, n - len(x))))
    H = fft(np.pad(h, (0, n - len(h))))
    return np.real(ifft(X * H))[:length]


def direct_convolve(x, h):
    return np.convolve(np.asarray(x, dtype=np.float64), np.asarray(h, dtype=np.float64), mode='full')


def convolve(x, h, method='fft'):
    if method == 'direct':
        return direct_convolve(x, h)
    return fft_convolve(x, h)
