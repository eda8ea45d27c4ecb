"""Filtering, resampling, alignment, segmentation and STFT.

Default bands: ECG 0.4-45 Hz, PPG 0.3-8 Hz. Working rate 125 Hz, windows of
512 samples with 50% overlap, min-max scaling to [-1, 1].
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy import signal

from .errors import AlignmentError, BandSpecificationError, DataError, DegenerateRangeError
from .peaks import find_peaks
from .waveform import EcgPpgPair, Segment, Spectrogram, Waveform

ECG_BAND = (0.4, 45.0)
PPG_BAND = (0.3, 8.0)
FILTER_ORDER = 4
RESAMPLE_KAISER_BETA = 10.0


def check_band(low_hz: float, high_hz: float, sample_rate_hz: float) -> None:
    nyquist = sample_rate_hz / 2.0
    if not (0 < low_hz < high_hz < nyquist):
        raise BandSpecificationError(
            f"band {low_hz}-{high_hz} Hz invalid at {sample_rate_hz} Hz "
            f"(need 0 < low < high < {nyquist})"
        )


def bandpass_sos(low_hz: float, high_hz: float, sample_rate_hz: float, order: int = FILTER_ORDER):
    check_band(low_hz, high_hz, sample_rate_hz)
    return signal.butter(order, [low_hz, high_hz], btype="bandpass", fs=sample_rate_hz, output="sos")


def settling_length(sos: np.ndarray, tol: float = 1e-4, max_len: int = 1_000_000) -> int:
    """Samples until the impulse-response envelope falls below ``tol`` of its peak."""
    # slowest pole sets the decay; |p|^n < tol
    poles = np.concatenate([np.roots(section[3:]) for section in sos])
    radius = float(np.max(np.abs(poles)))
    if radius <= 0:
        return 1
    if radius >= 1:
        return max_len
    return int(min(max_len, np.ceil(np.log(tol) / np.log(radius))))


def bandpass(w: Waveform, low_hz: float, high_hz: float, order: int = FILTER_ORDER) -> Waveform:
    """Zero-phase Butterworth band-pass.

    The filter runs forward and backward over a copy of the signal extended
    by one settling length of reflection at each end; the extension is
    trimmed afterwards, so output length and rate match the input.
    """
    w.require_nonempty()
    sos = bandpass_sos(low_hz, high_hz, w.sample_rate_hz, order)
    x = w.samples
    pad = min(settling_length(sos), x.size - 1)
    y = signal.sosfiltfilt(sos, x, padtype="even" if pad > 0 else None, padlen=pad)
    return w.with_samples(y)


def _rate_ratio(target: float, source: float) -> Fraction:
    return (Fraction(target).limit_denominator(10_000) / Fraction(source).limit_denominator(10_000)).limit_denominator(1000)


def resample(w: Waveform, target_rate_hz: float) -> Waveform:
    """Change the sample rate with an anti-aliased polyphase FIR.

    The output holds ``round(len * target / source)`` samples. Equal rates
    return the input untouched.
    """
    if not target_rate_hz > 0:
        raise DataError(f"target_rate_hz must be positive, got {target_rate_hz!r}")
    w.require_nonempty()
    if target_rate_hz == w.sample_rate_hz:
        return w
    ratio = _rate_ratio(target_rate_hz, w.sample_rate_hz)
    up, down = ratio.numerator, ratio.denominator
    # Kaiser windowed-sinc, cutoff at the lower of the two Nyquist rates.
    # beta=10 keeps passband ripple near 1e-6; scipy's default (5) leaves ~1e-3
    y = signal.resample_poly(w.samples, up, down, window=("kaiser", RESAMPLE_KAISER_BETA), padtype="line")
    n_out = int(round(len(w) * target_rate_hz / w.sample_rate_hz))
    if y.size < n_out:
        y = np.r_[y, np.full(n_out - y.size, y[-1])]
    return Waveform(y[:n_out], target_rate_hz)


def minmax_normalize(w: Waveform) -> Waveform:
    w.require_nonempty()
    x = w.samples
    lo, hi = float(x.min()), float(x.max())
    if not hi > lo:
        raise DegenerateRangeError("cannot min-max normalise a constant signal")
    y = 2.0 * (x - lo) / (hi - lo) - 1.0
    # pin the extremes exactly; the affine map can land a ulp off
    y[x == lo] = -1.0
    y[x == hi] = 1.0
    return w.with_samples(y)


def align_first_peaks(pair: EcgPpgPair, min_distance: int = 50, min_prominence: float = 0.0) -> EcgPpgPair:
    """Crop both channels to start at their first detected peak, then truncate to a common length."""
    starts = []
    for name, ch in (("ecg", pair.ecg), ("ppg", pair.ppg)):
        peaks = find_peaks(ch, min_distance, min_prominence)
        if len(peaks) == 0:
            raise AlignmentError(f"no peak detected in the {name} channel")
        starts.append(int(peaks.indices[0]))
    e0, p0 = starts
    n = min(len(pair) - e0, len(pair) - p0)
    fs = pair.sample_rate_hz
    return EcgPpgPair(
        Waveform(pair.ecg.samples[e0 : e0 + n], fs),
        Waveform(pair.ppg.samples[p0 : p0 + n], fs),
    )


def segment_starts(n: int, window: int = 512, overlap_fraction: float = 0.5) -> np.ndarray:
    if window < 1:
        raise DataError("window must be >= 1")
    if not 0 <= overlap_fraction < 1:
        raise DataError(f"overlap_fraction must be in [0, 1), got {overlap_fraction!r}")
    stride = max(1, int(round(window * (1.0 - overlap_fraction))))
    if window > n:
        return np.empty(0, dtype=np.int64)
    return np.arange(0, n - window + 1, stride, dtype=np.int64)


def segment(w: Waveform, window: int = 512, overlap_fraction: float = 0.5) -> list[Segment]:
    """Fixed-length windows; trailing partial windows are dropped."""
    x = w.samples
    return [Segment(int(s), x[s : s + window]) for s in segment_starts(len(w), window, overlap_fraction)]


def hann(n: int) -> np.ndarray:
    """Periodic Hann window."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def stft_spectrogram(w: Waveform, window_len: int = 128, hop: int = 64, delta: float = 1e-10) -> Spectrogram:
    """log(|STFT| + delta) with a Hann window; frames advance by ``hop`` samples."""
    if window_len < 1 or hop < 1:
        raise DataError("window_len and hop must be >= 1")
    if not delta > 0:
        raise DataError("delta must be positive")
    if window_len > len(w):
        raise DataError(f"window_len {window_len} exceeds signal length {len(w)}")
    x = w.samples
    n_frames = (len(w) - window_len) // hop + 1
    frames = np.lib.stride_tricks.sliding_window_view(x, window_len)[::hop][:n_frames]
    spec = np.abs(np.fft.rfft(frames * hann(window_len), axis=1))
    return Spectrogram(np.log(spec + delta), hop, window_len)
