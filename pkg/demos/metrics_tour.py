"""Distribution and waveform metrics on small, hand-checkable inputs.

Run with ``python3 demos/metrics_tour.py``.
"""
import numpy as np

from pulsesynth import (
    FeatureSet,
    RrSeries,
    UnitHistogram,
    compare_rr,
    frechet_distance,
    kl,
    ks,
    remd,
    rhi,
    segment_features,
    unit_histogram,
    Waveform,
)

# Histograms live on a one-sample grid; origin is the first bin's value.
A = UnitHistogram(0, [1, 0, 0])
B = UnitHistogram(0, [0, 0, 1])
print("all mass at opposite ends: remd =", remd(A, B))
print("  same pair, unit-mass CDFs:", remd(A, B, mass="distribution"))
C = UnitHistogram(0, [0, 1, 0])
print("one bin over on three bins: remd =", remd(A, C))

P, Q = UnitHistogram(0, [1, 1]), UnitHistogram(0, [1, 3])
print(f"kl(P, Q) = {kl(P, Q):.6f}, kl(Q, P) = {kl(Q, P):.6f}")
print(f"rhi(P, Q) = {rhi(P, Q):.3f}")

rng = np.random.default_rng(0)
a = RrSeries(rng.integers(80, 90, 200).astype(float), "samples", 125.0)
b = RrSeries(rng.integers(81, 91, 200).astype(float), "samples", 125.0)
print("histogram of a spans bins", unit_histogram(a).origin, "to", unit_histogram(a).stop - 1)
print(f"ks(a, b) = {ks(a, b):.3f}")
print(compare_rr(a, b).to_json())

# Fréchet distance between per-window feature sets.
t = np.arange(8192) / 125.0
w1 = Waveform(np.sin(2 * np.pi * 1.2 * t) + 0.05 * rng.normal(size=t.size), 125.0)
w2 = Waveform(np.sin(2 * np.pi * 1.6 * t) + 0.05 * rng.normal(size=t.size), 125.0)
f1, f2 = segment_features(w1), segment_features(w2)
print(f"{f1.rows.shape[0]} windows x {f1.dim} features")
print(f"fd(w1, w1) = {frechet_distance(f1, f1):.1e}, fd(w1, w2) = {frechet_distance(f1, f2):.3f}")
g = FeatureSet.from_1d(rng.normal(1.0, 2.0, 10_000))
r = FeatureSet.from_1d(rng.normal(0.0, 1.0, 10_000))
print(f"1-D Gaussians N(0,1) vs N(1,4): fd = {frechet_distance(r, g):.3f} (closed form 2.0)")
