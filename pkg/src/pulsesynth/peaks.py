"""Peak detection and RR-interval extraction.

The detector follows the familiar local-maxima recipe: strict local maxima
(plateaus collapse to their midpoint), an optional prominence floor, then
greedy thinning from the tallest peak down so that survivors sit at least
``min_distance`` samples apart.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, InsufficientPeaksError
from .waveform import Waveform

UNITS = ("samples", "ms")


@dataclass(frozen=True)
class PeakList:
    indices: np.ndarray
    min_distance: int = 1

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1:
            raise DataError("peak indices must be one-dimensional")
        if idx.size > 1 and np.any(np.diff(idx) < self.min_distance):
            raise DataError(f"peaks closer than min_distance={self.min_distance}")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return self.indices.shape[0]


@dataclass(frozen=True)
class RrSeries:
    """Ordered beat-to-beat intervals.

    ``unit`` is ``"samples"`` or ``"ms"``. A sample rate is mandatory for
    sample-valued series and enables conversion either way.
    """

    intervals: np.ndarray
    unit: str = "samples"
    sample_rate_hz: float | None = None

    def __post_init__(self):
        if self.unit not in UNITS:
            raise DataError(f"unit must be one of {UNITS}, got {self.unit!r}")
        arr = np.array(self.intervals, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise DataError("RR intervals must be finite and positive")
        arr.setflags(write=False)
        object.__setattr__(self, "intervals", arr)
        if self.unit == "samples" and self.sample_rate_hz is None:
            raise DataError("sample_rate_hz is required for sample-valued RR series")
        if self.sample_rate_hz is not None:
            fs = float(self.sample_rate_hz)
            if not fs > 0:
                raise DataError("sample_rate_hz must be positive")
            object.__setattr__(self, "sample_rate_hz", fs)

    def __len__(self) -> int:
        return self.intervals.shape[0]

    def to_ms(self) -> "RrSeries":
        if self.unit == "ms":
            return self
        return RrSeries(self.intervals * (1000.0 / self.sample_rate_hz), "ms", self.sample_rate_hz)

    def to_samples(self, sample_rate_hz: float | None = None) -> "RrSeries":
        fs = sample_rate_hz if sample_rate_hz is not None else self.sample_rate_hz
        if self.unit == "samples" and (fs is None or fs == self.sample_rate_hz):
            return self
        if fs is None:
            raise DataError("a sample rate is needed to express RR intervals in samples")
        ms = self.to_ms().intervals
        return RrSeries(ms * (fs / 1000.0), "samples", fs)

    def to_unit(self, unit: str) -> "RrSeries":
        return self.to_ms() if unit == "ms" else self.to_samples()

    def seconds(self) -> np.ndarray:
        return self.to_ms().intervals / 1000.0


def _local_maxima(x: np.ndarray) -> np.ndarray:
    # collapse runs of equal values, then look for runs higher than both neighbours
    if x.size < 3:
        return np.empty(0, dtype=np.int64)
    change = np.flatnonzero(np.diff(x) != 0) + 1
    starts = np.r_[0, change]
    ends = np.r_[change - 1, x.size - 1]
    vals = x[starts]
    is_peak = np.zeros(vals.size, dtype=bool)
    is_peak[1:-1] = (vals[1:-1] > vals[:-2]) & (vals[1:-1] > vals[2:])
    return ((starts[is_peak] + ends[is_peak]) // 2).astype(np.int64)


def _strictly_greater_bounds(x: np.ndarray):
    """Nearest strictly greater sample to the left and right of every index."""
    n = x.size
    left = np.full(n, -1, dtype=np.int64)
    right = np.full(n, n, dtype=np.int64)
    stack: list[int] = []
    xs = x.tolist()
    for i in range(n):
        v = xs[i]
        while stack and xs[stack[-1]] <= v:
            stack.pop()
        if stack:
            left[i] = stack[-1]
        stack.append(i)
    stack.clear()
    for i in range(n - 1, -1, -1):
        v = xs[i]
        while stack and xs[stack[-1]] <= v:
            stack.pop()
        if stack:
            right[i] = stack[-1]
        stack.append(i)
    return left, right


def peak_prominences(x: np.ndarray, peaks: np.ndarray) -> np.ndarray:
    """Height of each peak above the higher of its two bounding minima."""
    x = np.asarray(x, dtype=np.float64)
    peaks = np.asarray(peaks, dtype=np.int64)
    if peaks.size == 0:
        return np.empty(0)
    left, right = _strictly_greater_bounds(x)
    lo = left[peaks] + 1
    hi = right[peaks]
    # reduceat over interleaved [lo, hi) pairs; odd slots are discarded
    bounds = np.empty(2 * peaks.size, dtype=np.int64)
    bounds[0::2] = lo
    bounds[1::2] = peaks + 1
    left_min = np.minimum.reduceat(np.r_[x, np.inf], bounds)[0::2]
    bounds[0::2] = peaks
    bounds[1::2] = hi
    right_min = np.minimum.reduceat(np.r_[x, np.inf], bounds)[0::2]
    return x[peaks] - np.maximum(left_min, right_min)


def _thin_by_distance(peaks: np.ndarray, heights: np.ndarray, min_distance: int) -> np.ndarray:
    if peaks.size < 2 or min_distance <= 1:
        return peaks
    # tallest first; equal heights resolved toward the earlier index
    order = np.lexsort((peaks, -heights))
    keep = np.ones(peaks.size, dtype=bool)
    pos = peaks.tolist()
    for i in order.tolist():
        if not keep[i]:
            continue
        j = i - 1
        while j >= 0 and pos[i] - pos[j] < min_distance:
            keep[j] = False
            j -= 1
        j = i + 1
        while j < len(pos) and pos[j] - pos[i] < min_distance:
            keep[j] = False
            j += 1
    return peaks[keep]


def find_peaks(w: Waveform | np.ndarray, min_distance: int = 50, min_prominence: float = 0.0) -> PeakList:
    """Detect peaks in ``w``.

    Parameters
    ----------
    w : Waveform or array
        Signal to scan.
    min_distance : int
        Minimum spacing in samples between surviving peaks (>= 1).
    min_prominence : float
        Peaks whose prominence falls below this are dropped before thinning.

    Returns
    -------
    PeakList
        Strictly increasing sample indices; may be empty.
    """
    if int(min_distance) != min_distance or min_distance < 1:
        raise DataError(f"min_distance must be an integer >= 1, got {min_distance!r}")
    min_distance = int(min_distance)
    x = np.asarray(w.samples if isinstance(w, Waveform) else w, dtype=np.float64)
    peaks = _local_maxima(x)
    if min_prominence > 0 and peaks.size:
        peaks = peaks[peak_prominences(x, peaks) >= min_prominence]
    peaks = _thin_by_distance(peaks, x[peaks], min_distance)
    return PeakList(peaks, min_distance)


def rr_from_peaks(p: PeakList | np.ndarray, sample_rate_hz: float) -> RrSeries:
    """Consecutive peak spacings, in samples."""
    idx = p.indices if isinstance(p, PeakList) else np.asarray(p, dtype=np.int64)
    if idx.size < 2:
        raise InsufficientPeaksError(f"need at least 2 peaks to form an RR interval, got {idx.size}")
    return RrSeries(np.diff(idx).astype(np.float64), "samples", sample_rate_hz)


@dataclass(frozen=True)
class RrReportRow:
    beat: int
    truth: float
    recon: float
    deviation: float


@dataclass(frozen=True)
class RrReport:
    unit: str
    rows: list[RrReportRow] = field(default_factory=list)

    @property
    def deviations(self) -> np.ndarray:
        return np.array([r.deviation for r in self.rows])

    @property
    def mean_deviation(self) -> float:
        return float(self.deviations.mean())

    @property
    def max_abs_deviation(self) -> float:
        return float(np.abs(self.deviations).max())

    def to_csv(self) -> str:
        lines = ["beat,truth,recon,deviation"]
        lines += [f"{r.beat},{r.truth!r},{r.recon!r},{r.deviation!r}" for r in self.rows]
        lines.append(f"mean,,,{self.mean_deviation!r}")
        lines.append(f"max_abs,,,{self.max_abs_deviation!r}")
        return "\n".join(lines) + "\n"


def rr_report(truth: RrSeries, recon: RrSeries) -> RrReport:
    """Beat-by-beat comparison; deviation is ``recon - truth`` in the truth's unit."""
    if len(truth) == 0 or len(recon) == 0:
        raise DataError("rr_report needs two non-empty series")
    if recon.unit != truth.unit:
        recon = recon.to_unit(truth.unit)
    n = min(len(truth), len(recon))
    t = truth.intervals[:n]
    r = recon.intervals[:n]
    rows = [RrReportRow(i, float(t[i]), float(r[i]), float(r[i] - t[i])) for i in range(n)]
    return RrReport(truth.unit, rows)
