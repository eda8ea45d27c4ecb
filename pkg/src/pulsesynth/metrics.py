"""RR-distribution and waveform comparison metrics.

Distribution metrics operate on unit-width histograms: one bin per RR unit
(samples by default), each interval binned by ``floor``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DataError, DomainError, InsufficientDataError, ShapeError
from .peaks import RrSeries
from .preprocess import segment_starts
from .waveform import Waveform

KL_EPS = 1e-10
FD_RIDGE = 1e-6


@dataclass(frozen=True)
class UnitHistogram:
    origin: int
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64).reshape(-1)
        if np.any(c < 0):
            raise DataError("histogram counts must be non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "origin", int(self.origin))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def stop(self) -> int:
        """One past the last bin's left edge."""
        return self.origin + self.counts.size

    def as_dict(self) -> dict[int, int]:
        return {self.origin + i: int(c) for i, c in enumerate(self.counts) if c}


def unit_histogram(rr: RrSeries | np.ndarray) -> UnitHistogram:
    vals = rr.intervals if isinstance(rr, RrSeries) else np.asarray(rr, dtype=np.float64)
    if vals.size == 0:
        raise DataError("cannot histogram an empty RR series")
    bins = np.floor(vals).astype(np.int64)
    origin = int(bins.min())
    return UnitHistogram(origin, np.bincount(bins - origin))


def _aligned(A: UnitHistogram, B: UnitHistogram):
    lo = min(A.origin, B.origin)
    hi = max(A.stop, B.stop)
    a = np.zeros(hi - lo, dtype=np.int64)
    b = np.zeros(hi - lo, dtype=np.int64)
    a[A.origin - lo : A.stop - lo] = A.counts
    b[B.origin - lo : B.stop - lo] = B.counts
    return a, b


def _require_mass(*hists: UnitHistogram) -> None:
    for h in hists:
        if h.total <= 0:
            raise DomainError("histogram has zero total count")


def rhi(A: UnitHistogram, B: UnitHistogram) -> float:
    """Histogram intersection divided by the smaller total; 1 means identical."""
    _require_mass(A, B)
    a, b = _aligned(A, B)
    return float(np.minimum(a, b).sum() / min(a.sum(), b.sum()))


def emd(A: UnitHistogram, B: UnitHistogram) -> float:
    """1-D earth mover's distance between the two normalised histograms (bin width 1)."""
    _require_mass(A, B)
    a, b = _aligned(A, B)
    return float(np.abs(np.cumsum(a / a.sum() - b / b.sum())).sum())


def remd(A: UnitHistogram, B: UnitHistogram, mass: str = "counts") -> float:
    """Relative earth mover's distance.

    EMD is the transport cost of moving ``A``'s counts onto ``B`` rescaled to
    the same total, i.e. ``total(A) * sum |F_A - F_B|`` over the contiguous
    union of both supports. It is divided by ``total(A) * (n_bins - 1)``,
    the cost of carrying every count across the full support, so the
    result lies in [0, 1].

    ``mass="distribution"`` keeps EMD on the normalised CDFs while still
    dividing by ``total(A)``; that value shrinks as ``1 / total(A)``.
    """
    if mass not in ("distribution", "counts"):
        raise ValueError(f"mass must be 'distribution' or 'counts', got {mass!r}")
    e = emd(A, B)
    a, _ = _aligned(A, B)
    max_distance = a.size - 1
    if e == 0.0 or max_distance == 0:
        return 0.0
    total = A.total
    moved = e * total if mass == "counts" else e
    return float(min(1.0, moved / (total * max_distance)))


def kl(P: UnitHistogram, Q: UnitHistogram, eps: float = KL_EPS) -> float:
    """KL(P || Q) in nats over the union support; empty Q bins are floored at ``eps``."""
    _require_mass(P, Q)
    p, q = _aligned(P, Q)
    p = p / p.sum()
    q = q / q.sum()
    m = p > 0
    qm = np.where(q[m] > 0, q[m], eps)
    return float(max(0.0, np.sum(p[m] * np.log(p[m] / qm))))


def _values(x) -> np.ndarray:
    v = x.intervals if isinstance(x, RrSeries) else np.asarray(x, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise DomainError("empty series")
    return v


def _paired(A, B):
    if isinstance(A, RrSeries) and isinstance(B, RrSeries) and A.unit != B.unit:
        B = B.to_unit(A.unit)
    a, b = _values(A), _values(B)
    n = min(a.size, b.size)
    return a[:n], b[:n]


def rrmse_rr(A: RrSeries, B: RrSeries) -> float:
    """RMSE over chronologically paired intervals divided by the mean of ``A``'s paired prefix."""
    a, b = _paired(A, B)
    return float(np.sqrt(np.mean((a - b) ** 2)) / np.mean(a))


def ks(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic (no p-value)."""
    if isinstance(a, RrSeries) and isinstance(b, RrSeries) and a.unit != b.unit:
        b = b.to_unit(a.unit)
    x = np.sort(_values(a))
    y = np.sort(_values(b))
    grid = np.concatenate([x, y])
    fx = np.searchsorted(x, grid, side="right") / x.size
    fy = np.searchsorted(y, grid, side="right") / y.size
    return float(np.max(np.abs(fx - fy)))


def waveform_rmse(truth: Waveform | np.ndarray, recon: Waveform | np.ndarray) -> float:
    t = truth.samples if isinstance(truth, Waveform) else np.asarray(truth, dtype=np.float64)
    r = recon.samples if isinstance(recon, Waveform) else np.asarray(recon, dtype=np.float64)
    if t.shape != r.shape:
        raise ShapeError(f"length mismatch: {t.shape} vs {r.shape}")
    if t.size == 0:
        raise ShapeError("empty signals")
    return float(np.sqrt(np.mean((t - r) ** 2)))


def hrv(rr: RrSeries | np.ndarray) -> tuple[float, float]:
    """Mean and population standard deviation of the intervals, in the series' unit."""
    v = _values(rr)
    if v.size < 2:
        raise InsufficientDataError("HRV standard deviation needs at least 2 intervals")
    return float(v.mean()), float(v.std())


def mae_hr(truth: RrSeries, recon: RrSeries) -> float:
    """Mean absolute heart-rate error in BPM over chronologically paired beats."""
    t, r = _paired(truth.to_ms(), recon.to_ms())
    if np.any(t <= 0) or np.any(r <= 0):
        raise DomainError("zero-length RR interval")
    return float(np.mean(np.abs(60000.0 / t - 60000.0 / r)))


@dataclass(frozen=True)
class FeatureSet:
    rows: np.ndarray

    def __post_init__(self):
        r = np.atleast_2d(np.asarray(self.rows, dtype=np.float64))
        if r.ndim != 2:
            raise ShapeError("feature rows must form a 2-D matrix")
        if r.shape[0] < 2:
            raise InsufficientDataError("need at least 2 feature rows to estimate a covariance")
        if not np.all(np.isfinite(r)):
            raise DataError("features must be finite")
        r.setflags(write=False)
        object.__setattr__(self, "rows", r)

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def from_1d(cls, values) -> "FeatureSet":
        return cls(np.asarray(values, dtype=np.float64).reshape(-1, 1))


def _sym_sqrt(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((m + m.T) / 2.0)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def frechet_distance_from_moments(mu_r, cov_r, mu_g, cov_g, ridge: float = FD_RIDGE) -> float:
    """Fréchet distance between Gaussians N(mu_r, cov_r) and N(mu_g, cov_g).

    Both square roots come from symmetric eigendecompositions. The
    eigenvalues of ``S_r^1/2 S_g S_r^1/2`` are the squared singular values
    of ``S_r^1/2 S_g^1/2``, so ``tr((S_r S_g)^1/2)`` is taken as the sum of
    those singular values; this avoids square-rooting eigenvalues that sit
    at round-off level when the features are nearly rank-deficient.
    """
    mu_r = np.atleast_1d(np.asarray(mu_r, dtype=np.float64))
    mu_g = np.atleast_1d(np.asarray(mu_g, dtype=np.float64))
    cov_r = np.atleast_2d(np.asarray(cov_r, dtype=np.float64))
    cov_g = np.atleast_2d(np.asarray(cov_g, dtype=np.float64))
    d = mu_r.size
    if mu_g.size != d or cov_r.shape != (d, d) or cov_g.shape != (d, d):
        raise ShapeError("mean/covariance dimensions disagree")
    eye = np.eye(d) * ridge
    cov_r = cov_r + eye
    cov_g = cov_g + eye
    tr_sqrt = float(np.linalg.svd(_sym_sqrt(cov_r) @ _sym_sqrt(cov_g), compute_uv=False).sum())
    diff = mu_r - mu_g
    fd = float(diff @ diff + np.trace(cov_r) + np.trace(cov_g) - 2.0 * tr_sqrt)
    return max(fd, 0.0)


def frechet_distance(real_features: FeatureSet, gen_features: FeatureSet) -> float:
    if real_features.dim != gen_features.dim:
        raise ShapeError(f"feature dims differ: {real_features.dim} vs {gen_features.dim}")
    r, g = real_features.rows, gen_features.rows
    return frechet_distance_from_moments(
        r.mean(axis=0), np.cov(r, rowvar=False), g.mean(axis=0), np.cov(g, rowvar=False)
    )


FEATURE_NAMES = (
    "mean", "std", "min", "max", "rms", "zero_crossing_rate",
    "dominant_bin", "spectral_centroid", "skewness", "kurtosis",
)


def _segment_descriptor(x: np.ndarray) -> np.ndarray:
    n = x.size
    mean = x.mean()
    centred = x - mean
    std = np.sqrt(np.mean(centred ** 2))
    signs = np.signbit(x)
    zcr = np.count_nonzero(signs[1:] != signs[:-1]) / (n - 1) if n > 1 else 0.0
    power = np.abs(np.fft.rfft(centred)) ** 2
    total = power.sum()
    if total > 0:
        dominant = float(np.argmax(power))
        centroid = float(np.sum(np.arange(power.size) * power) / total)
    else:
        dominant = centroid = 0.0
    if std > 0:
        z = centred / std
        skew = float(np.mean(z ** 3))
        kurt = float(np.mean(z ** 4) - 3.0)
    else:
        skew = kurt = 0.0
    return np.array([mean, std, x.min(), x.max(), np.sqrt(np.mean(x ** 2)), zcr,
                     dominant, centroid, skew, kurt])


def segment_features(w: Waveform, window: int = 512, overlap: float = 0.5) -> FeatureSet:
    """Ten descriptors per window, in the order of ``FEATURE_NAMES``.

    Zero crossings are counted on the raw (uncentred) samples; the spectral
    features use the mean-removed window so the DC bin never dominates.
    """
    starts = segment_starts(len(w), window, overlap)
    if starts.size < 2:
        raise InsufficientDataError(f"need at least 2 segments, got {starts.size}")
    x = w.samples
    return FeatureSet(np.vstack([_segment_descriptor(x[s : s + window]) for s in starts]))


@dataclass
class MetricReport:
    rhi: float | None = None
    rrmse: float | None = None
    remd: float | None = None
    kl: float | None = None
    ks: float | None = None
    waveform_rmse: float | None = None
    hrv_mean: float | None = None
    hrv_std: float | None = None
    hrv_mean_ref: float | None = None
    hrv_std_ref: float | None = None
    mae_hr: float | None = None
    fd: float | None = None
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, value in self.values().items():
            if not math.isfinite(value):
                raise DataError(f"metric {name} is not finite")

    def values(self) -> dict[str, float]:
        return {k: v for k, v in asdict(self).items() if k != "inputs" and v is not None}

    def to_json(self) -> str:
        return json.dumps({**self.values(), "inputs": self.inputs}, indent=2, sort_keys=True) + "\n"


def compare_rr(truth: RrSeries, recon: RrSeries, inputs: dict | None = None) -> MetricReport:
    """All RR-distribution metrics plus HRV and MAE_HR; HRV is reported in ms."""
    if recon.unit != truth.unit:
        recon = recon.to_unit(truth.unit)
    ha, hb = unit_histogram(truth), unit_histogram(recon)
    ref_mean, ref_std = hrv(truth.to_ms())
    mean, std = hrv(recon.to_ms())
    return MetricReport(
        rhi=rhi(ha, hb),
        rrmse=rrmse_rr(truth, recon),
        remd=remd(ha, hb),
        kl=kl(ha, hb),
        ks=ks(truth, recon),
        hrv_mean=mean,
        hrv_std=std,
        hrv_mean_ref=ref_mean,
        hrv_std_ref=ref_std,
        mae_hr=mae_hr(truth, recon),
        inputs=dict(inputs or {}, unit=truth.unit),
    )
