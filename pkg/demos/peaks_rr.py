"""Detect R peaks, turn them into RR intervals and compare with the prescription.

Run with ``python3 demos/peaks_rr.py``.
"""
import numpy as np

from pulsesynth import (
    RrSeries,
    SynthesisConfig,
    find_peaks,
    gaussian_rr,
    preset,
    rr_from_peaks,
    rr_report,
    scheduled_r_times,
    synthesize,
)

FS = 125.0
rr = gaussian_rr(750, 60, 7_500, FS, seed=4)
cfg = SynthesisConfig(preset("RSR"), rr, FS, n_samples=7_500)
ecg = synthesize(cfg).ecg

# With distance alone the detector also reports the T wave that opens the
# record (it starts mid-beat). A small prominence floor removes it.
bare = find_peaks(ecg, min_distance=50)
floored = find_peaks(ecg, min_distance=50, min_prominence=0.05)
print(f"peaks, distance only: {len(bare)}; with prominence 0.05: {len(floored)}")
print(f"first peaks: {bare.indices[:3].tolist()} vs {floored.indices[:3].tolist()}")

expected = scheduled_r_times(cfg)
print(f"scheduled R crossings near: {np.round(expected[:3]).astype(int).tolist()}")

detected = rr_from_peaks(floored, FS)
n_full = expected.size - 1
truth = RrSeries(rr.intervals[:n_full], "samples", FS)
report = rr_report(truth.to_ms(), detected.to_ms())
print(f"beats compared: {len(report.rows)}")
print(f"mean deviation {report.mean_deviation:+.2f} ms, worst {report.max_abs_deviation:.1f} ms")
print(report.to_csv().splitlines()[:4])
