"""Band-limit, resample, align and cut a synthetic record into windows.

Run with ``python3 demos/preprocessing.py``.
"""
import numpy as np

from pulsesynth import (
    SynthesisConfig,
    Waveform,
    align_first_peaks,
    bandpass,
    gaussian_rr,
    minmax_normalize,
    preset,
    resample,
    segment,
    stft_spectrogram,
    synthesize,
)
from pulsesynth.preprocess import ECG_BAND, PPG_BAND

FS = 125.0
n = 15_000
pair = synthesize(SynthesisConfig(preset("RSR"), gaussian_rr(800, 40, n, FS, seed=1), FS, n_samples=n))

# Add baseline wander and mains-like hum, then filter it back out.
t = np.arange(n) / FS
wander = 0.5 * np.sin(2 * np.pi * 0.05 * t)
dirty = Waveform(pair.ecg.samples + wander, FS)
clean = bandpass(dirty, *ECG_BAND)
residual = clean.samples[500:-500] - bandpass(pair.ecg, *ECG_BAND).samples[500:-500]
print(f"ECG band {ECG_BAND} Hz, wander left after filtering: {np.abs(residual).max():.2e}")
ppg = bandpass(pair.ppg, *PPG_BAND)
print(f"PPG band {PPG_BAND} Hz, filtered std {ppg.samples.std():.3f}")

# Rational-ratio resampling to 300 Hz and back.
up = resample(clean, 300.0)
back = resample(up, FS)
print(f"125 -> 300 -> 125 Hz: {len(clean)} -> {len(up)} -> {len(back)} samples, "
      f"max error {np.abs(back.samples - clean.samples)[200:-200].max():.1e}")

# Crop both channels so their first detected peaks coincide.
aligned = align_first_peaks(pair, min_distance=50, min_prominence=0.05)
print(f"aligned pair: {len(aligned)} samples")

# Windows and a log-magnitude spectrogram.
norm = minmax_normalize(aligned.ecg)
windows = segment(norm, 512, 0.5)
print(f"{len(windows)} windows of 512 samples with 50% overlap")
spec = stft_spectrogram(Waveform(windows[0].values, FS))
print(f"spectrogram of first window: {spec.n_frames} frames x {spec.n_bins} bins")
