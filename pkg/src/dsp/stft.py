import numpy as np

from utils import LabError
from const import T_WindowTooLong, T_BadStftParams
from dsp.fft import fft


class WindowTooLong(LabError):
    def __init__(self, n, win):
        self.n = n
        self.win = win

    def __str__(self):
        return T_WindowTooLong.format(self.n, self.win)


class BadStftParams(LabError):
    def __init__(self, win, hop, nfft):
        self.params = (win, hop, nfft)

    def __str__(self):
        return T_BadStftParams.format(*self.params)


def hann_window(win):
    """Periodic Hann window"""
    n = np.arange(win)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / win)


def frame_count(n, win, hop):
    return (n - win) // hop + 1


def stft_magnitude(signal, win, hop, nfft):
    """|STFT| of a (..., N) signal as (..., nfft // 2 + 1, frames)

    Frames are fully interior: no centering or edge padding.
    """
    if win <= 0 or hop <= 0 or nfft < win:
        raise BadStftParams(win, hop, nfft)
    x = np.asarray(signal, dtype=np.float64)
    n = x.shape[-1]
    if n < win:
        raise WindowTooLong(n, win)

    frames = np.lib.stride_tricks.sliding_window_view(x, win, axis=-1)[..., ::hop, :]
    frames = frames * hann_window(win)
    padded = np.concatenate([frames, np.zeros(frames.shape[:-1] + (nfft - win,))], axis=-1)
    spectrum = fft(padded)[..., :nfft // 2 + 1]
    return np.swapaxes(np.abs(spectrum), -1, -2)


def stft_log_magnitude(wave, win, hop, nfft):
    """log(1 + |STFT|) per channel of a binaural waveform: (2, nfft // 2 + 1, frames)"""
    stacked = wave.stack() if hasattr(wave, 'stack') else np.asarray(wave)
    return np.log1p(stft_magnitude(stacked, win, hop, nfft))
