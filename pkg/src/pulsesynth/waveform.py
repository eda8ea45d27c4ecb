"""Signal containers shared by every stage of the toolkit."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Waveform:
    """Uniformly sampled 1-D signal.

    ``samples`` is stored as an immutable float64 array; all values must be
    finite and ``sample_rate_hz`` strictly positive.
    """

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen_array(self.samples, "samples"))
        fs = float(self.sample_rate_hz)
        if not np.isfinite(fs) or fs <= 0:
            raise DataError(f"sample_rate_hz must be positive, got {self.sample_rate_hz!r}")
        object.__setattr__(self, "sample_rate_hz", fs)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    def with_samples(self, samples) -> "Waveform":
        return Waveform(samples, self.sample_rate_hz)

    def require_nonempty(self) -> None:
        if len(self) == 0:
            raise DataError("waveform is empty")


@dataclass(frozen=True)
class EcgPpgPair:
    """Synchronised ECG and PPG channels on a shared time base."""

    ecg: Waveform
    ppg: Waveform

    def __post_init__(self):
        if self.ecg.sample_rate_hz != self.ppg.sample_rate_hz:
            raise DataError(
                f"channel rates differ: ecg {self.ecg.sample_rate_hz} Hz, "
                f"ppg {self.ppg.sample_rate_hz} Hz"
            )
        if len(self.ecg) != len(self.ppg):
            raise DataError(f"channel lengths differ: ecg {len(self.ecg)}, ppg {len(self.ppg)}")

    @property
    def sample_rate_hz(self) -> float:
        return self.ecg.sample_rate_hz

    def __len__(self) -> int:
        return len(self.ecg)

    @classmethod
    def from_arrays(cls, ecg, ppg, sample_rate_hz: float) -> "EcgPpgPair":
        return cls(Waveform(ecg, sample_rate_hz), Waveform(ppg, sample_rate_hz))


@dataclass(frozen=True)
class Segment:
    start_index: int
    values: np.ndarray

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Spectrogram:
    """Log-magnitude STFT; rows are frames, columns are frequency bins."""

    magnitudes: np.ndarray
    hop: int
    window_len: int

    @property
    def n_frames(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def n_bins(self) -> int:
        return self.magnitudes.shape[1]
