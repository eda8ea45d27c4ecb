"""Deterministic paired ECG/PPG synthesis and RR-distribution metrics."""

__version__ = "0.1.0"

from .errors import (
    AlignmentError,
    BandSpecificationError,
    DataError,
    DegenerateRangeError,
    DomainError,
    InsufficientDataError,
    InsufficientPeaksError,
    IntegrationDivergenceError,
    NumericalError,
    PulseSynthError,
    ShapeError,
    TemplateValidationError,
)
from .metrics import (
    FeatureSet,
    MetricReport,
    UnitHistogram,
    compare_rr,
    emd,
    frechet_distance,
    frechet_distance_from_moments,
    hrv,
    kl,
    ks,
    mae_hr,
    remd,
    rhi,
    rrmse_rr,
    segment_features,
    unit_histogram,
    waveform_rmse,
)
from .peaks import PeakList, RrReport, RrSeries, find_peaks, rr_from_peaks, rr_report
from .preprocess import (
    align_first_peaks,
    bandpass,
    minmax_normalize,
    resample,
    segment,
    stft_spectrogram,
)
from .synth import (
    ModelConstants,
    RhythmTemplate,
    SynthesisConfig,
    cycle_frequency,
    derivatives,
    gaussian_rr,
    perturb_template,
    preset,
    scheduled_r_times,
    synthesize,
)
from .waveform import EcgPpgPair, Segment, Spectrogram, Waveform
