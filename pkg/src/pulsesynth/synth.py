"""Paired ECG/PPG synthesis from a five-state oscillator.

State ``u = [x, y, z, v, w]``. The ``(x, y)`` pair circles a unit limit
cycle whose angle drives Gaussian wave events into ``z`` (the ECG); ``w``
integrates ``z**2`` and feeds ``v`` (the PPG)::

    dx/dt = alpha*x - omega*y
    dy/dt = alpha*y + omega*x
    dz/dt = -sum_i a_i*dth_i*exp(-dth_i**2 / (2*b_i**2)) - (z - z0)
    dv/dt = -B0*v + B1*w
    dw/dt = z**2 - B2*w

with ``alpha = 1 - sqrt(x**2 + y**2)``, ``dth_i = wrap(atan2(y, x) - theta_i)``
and ``z0 = A*sin(2*pi*f0*t)``.

Time scale: a beat of ``rr`` samples runs at ``f = f_bar * fs / rr`` and one
output sample spans ``1 / (f_bar * fs)`` model time units, so a 60 BPM beat
(``rr == fs``) runs at exactly ``f_bar``.
"""
from __future__ import annotations

import json
import math
from importlib import resources
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import DataError, DomainError, IntegrationDivergenceError, TemplateValidationError
from .peaks import RrSeries
from .preprocess import minmax_normalize
from .waveform import EcgPpgPair, Waveform

U0 = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0), 0.2, 0.005, 0.0)
WIDTH_FLOOR = 1e-3
R_WAVE_ANGLE = 0.0


@dataclass(frozen=True)
class RhythmTemplate:
    """Per-wave amplitudes ``a``, widths ``b`` (rad) and reference angles ``theta`` (rad)."""

    a: tuple
    b: tuple
    theta: tuple
    name: str = "custom"

    def __post_init__(self):
        for fname in ("a", "b", "theta"):
            vals = getattr(self, fname)
            try:
                vals = tuple(float(v) for v in vals)
            except (TypeError, ValueError) as exc:
                raise TemplateValidationError(fname, f"must be a list of numbers ({exc})") from None
            for i, v in enumerate(vals):
                if not math.isfinite(v):
                    raise TemplateValidationError(f"{fname}[{i}]", "must be finite")
            object.__setattr__(self, fname, vals)
        n = len(self.a)
        if n < 5:
            raise TemplateValidationError("a", f"needs at least 5 waves, got {n}")
        for fname in ("b", "theta"):
            if len(getattr(self, fname)) != n:
                raise TemplateValidationError(fname, f"length {len(getattr(self, fname))} != len(a) {n}")
        for i, v in enumerate(self.b):
            if v <= 0:
                raise TemplateValidationError(f"b[{i}]", f"width must be positive, got {v}")
        for i, v in enumerate(self.theta):
            if not -math.pi < v <= math.pi:
                raise TemplateValidationError(f"theta[{i}]", f"angle {v} outside (-pi, pi]")
            if i and v <= self.theta[i - 1]:
                raise TemplateValidationError(f"theta[{i}]", "angles must be strictly increasing")

    def __len__(self) -> int:
        return len(self.a)

    def arrays(self):
        return np.array(self.a), np.array(self.b), np.array(self.theta)

    def to_dict(self) -> dict:
        return {"name": self.name, "a": list(self.a), "b": list(self.b), "theta": list(self.theta)}

    @classmethod
    def from_dict(cls, d: dict) -> "RhythmTemplate":
        if not isinstance(d, dict):
            raise TemplateValidationError("<root>", "template must be a JSON object")
        for key in ("a", "b", "theta"):
            if key not in d:
                raise TemplateValidationError(key, "missing")
        return cls(d["a"], d["b"], d["theta"], str(d.get("name", "custom")))


def load_template(path) -> RhythmTemplate:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise TemplateValidationError("<root>", f"invalid JSON: {exc}") from None
    return RhythmTemplate.from_dict(data)


def bundled_template(name: str) -> RhythmTemplate:
    """Example template shipped in ``pulsesynth/templates`` (e.g. ``interwave8``)."""
    res = resources.files("pulsesynth").joinpath("templates", f"{name}.json")
    if not res.is_file():
        raise KeyError(f"no bundled template named {name!r}")
    return RhythmTemplate.from_dict(json.loads(res.read_text()))


def save_template(t: RhythmTemplate, path) -> None:
    Path(path).write_text(json.dumps(t.to_dict(), indent=2) + "\n")


@dataclass(frozen=True)
class ModelConstants:
    A: float = 0.01
    f0: float = 0.25
    B0: float = 0.5
    B1: float = 0.5
    B2: float = 1.25
    f_bar: float = 0.1

    def __post_init__(self):
        for name in ("A", "f0", "B0", "B1", "B2", "f_bar"):
            if not math.isfinite(getattr(self, name)):
                raise DataError(f"constant {name} must be finite")
        if self.B0 <= 0 or self.B2 <= 0:
            raise DataError("B0 and B2 must be positive")
        if self.f_bar <= 0:
            raise DataError("f_bar must be positive")


_PI = math.pi
PRESETS = {
    "RSR": RhythmTemplate(
        a=(1.2, -5.0, 30.0, -7.5, 0.75),
        b=(0.25, 0.1, 0.1, 0.1, 0.4),
        theta=(-_PI / 3, -_PI / 12, 0.0, _PI / 12, _PI / 2),
        name="RSR",
    ),
    "SA": RhythmTemplate(
        a=(1.0, 2.0, 3.0, 3.0, 2.5, -1.0, 0.5),
        b=(0.2, 0.15, 0.15, 0.2, 0.15, 0.2, 0.4),
        theta=(-_PI / 1.5, -_PI / 2.0, -_PI / 6.5, -_PI / 12.0, 0.0, _PI / 12.0, _PI / 1.5),
        name="SA",
    ),
    "AFIB": RhythmTemplate(
        a=(-1.0, 0.5, 1.0, -2.0, 25.0, -10.0, 2.0, -2.0, 0.5, 0.5, 0.5),
        b=(0.1, 0.15, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.2, 0.2, 0.2),
        theta=(-_PI / 2.0, -_PI / 3.0, -_PI / 5.0, -_PI / 12.0, 0.0, _PI / 12.0,
               _PI / 6.0, _PI / 5.0, _PI / 2.5, _PI / 2.0, _PI / 1.5),
        name="AFIB",
    ),
}


def preset(name: str) -> RhythmTemplate:
    """Built-in rhythm template by name: ``RSR``, ``SA`` or ``AFIB`` (case-insensitive)."""
    key = str(name).upper().replace("-", "")
    if key not in PRESETS:
        raise KeyError(f"unknown rhythm {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[key]


def cycle_frequency(f_bar: float, rr_mean: float, rr_c: float) -> float:
    """Frequency of one beat whose interval is ``rr_c``: ``f_bar * rr_mean / rr_c``."""
    if not (rr_c > 0 and rr_mean > 0):
        raise DomainError(f"RR intervals must be positive (rr_mean={rr_mean}, rr_c={rr_c})")
    return f_bar * rr_mean / rr_c


def derivatives(s, t: float, template: RhythmTemplate, constants: ModelConstants, f: float) -> np.ndarray:
    """Right-hand side ``du/dt`` at state ``s`` and model time ``t``."""
    if not f > 0:
        raise DomainError("frequency must be positive")
    a, b, th = template.arrays()
    out = np.empty(5)
    c = constants
    _kernels.rhs(np.asarray(s, dtype=np.float64), float(t), 2.0 * math.pi * f, a, b, th,
                 c.A, c.f0, c.B0, c.B1, c.B2, out)
    return out


def perturb_template(t: RhythmTemplate, rel_std: float, seed: int) -> RhythmTemplate:
    """Add zero-mean Gaussian noise with std ``rel_std * |p|`` to every parameter.

    Widths are floored at 1e-3 rad; angles are wrapped back into (-pi, pi]
    and waves re-ordered by angle if the noise swapped any.
    """
    if rel_std < 0:
        raise DataError("rel_std must be non-negative")
    if rel_std == 0:
        return t
    rng = np.random.default_rng(seed)
    a, b, th = t.arrays()
    a = a + rng.normal(0.0, 1.0, a.size) * rel_std * np.abs(a)
    b = b + rng.normal(0.0, 1.0, b.size) * rel_std * np.abs(b)
    th = th + rng.normal(0.0, 1.0, th.size) * rel_std * np.abs(th)
    b = np.maximum(b, WIDTH_FLOOR)
    th = np.array([_kernels.wrap_angle(v) for v in th])
    order = np.argsort(th, kind="stable")
    return RhythmTemplate(tuple(a[order]), tuple(b[order]), tuple(th[order]), t.name)


@dataclass(frozen=True)
class SynthesisConfig:
    """Everything that determines one synthetic recording.

    ``rr_targets`` are beat intervals; plain arrays are read as samples at
    ``sample_rate_hz``. They are consumed in order and recycled if the recording outlasts them.
    ``n_samples`` defaults to ``sum(rr_targets)``.
    """

    template: RhythmTemplate
    rr_targets: RrSeries
    sample_rate_hz: float = 125.0
    constants: ModelConstants = field(default_factory=ModelConstants)
    oversample: int = 8
    noise_rel_std: float = 0.0
    seed: int = 0
    n_samples: int | None = None
    initial_state: tuple = U0

    def __post_init__(self):
        if not self.sample_rate_hz > 0:
            raise DataError("sample_rate_hz must be positive")
        if int(self.oversample) != self.oversample or self.oversample < 1:
            raise DataError("oversample must be an integer >= 1")
        if self.noise_rel_std < 0:
            raise DataError("noise_rel_std must be non-negative")
        if not 0 <= int(self.seed) < 2**64:
            raise DataError("seed must fit in an unsigned 64-bit integer")
        rr = self.rr_targets
        if not isinstance(rr, RrSeries):
            rr = RrSeries(np.asarray(rr, dtype=np.float64), "samples", self.sample_rate_hz)
        rr = rr.to_samples(self.sample_rate_hz)
        if len(rr) == 0:
            raise DataError("rr_targets is empty")
        if np.any(rr.intervals < 2):
            raise DataError("every RR target must span at least 2 samples")
        object.__setattr__(self, "rr_targets", rr)
        if self.n_samples is not None and self.n_samples < 1:
            raise DataError("n_samples must be >= 1")

    @property
    def length(self) -> int:
        if self.n_samples is not None:
            return int(self.n_samples)
        return int(math.floor(self.rr_targets.intervals.sum()))


def beat_schedule(rr: np.ndarray, n_samples: int, theta0: float, sample_rate_hz: float, f_bar: float):
    """Times (in samples) of frequency switches and the frequency of each stretch.

    The oscillator starts at angle ``theta0`` and first runs up to the R-wave
    angle; that lead-in is stretched to a whole number of samples so every
    later R crossing falls on the sample grid (for integer RR targets). From
    there beat ``k`` lasts exactly ``rr[k % len(rr)]`` samples. Switching on
    R crossings makes every R-to-R interval a single beat.
    """
    rr_ref = sample_rate_hz
    lead_frac = (R_WAVE_ANGLE - theta0) % (2.0 * math.pi) / (2.0 * math.pi)
    lead = float(round(lead_frac * rr[0]))
    if lead_frac > 0 and lead == 0:
        lead = 1.0
    switch = [lead]
    freqs = [cycle_frequency(f_bar, rr_ref, lead / lead_frac) if lead_frac > 0 else 1.0]
    k = 0
    while switch[-1] < n_samples:
        rc = rr[k % rr.size]
        freqs.append(cycle_frequency(f_bar, rr_ref, rc))
        switch.append(switch[-1] + rc)
        k += 1
    return np.array(switch), np.array(freqs)


def scheduled_r_times(cfg: "SynthesisConfig") -> np.ndarray:
    """Sample times at which the oscillator crosses the R-wave angle."""
    theta0 = math.atan2(cfg.initial_state[1], cfg.initial_state[0])
    switch, _ = beat_schedule(cfg.rr_targets.intervals, cfg.length, theta0,
                              cfg.sample_rate_hz, cfg.constants.f_bar)
    return switch[switch < cfg.length]


def simulate_states(cfg: SynthesisConfig, template: RhythmTemplate | None = None):
    """Raw ``(n, 5)`` state trajectory and the model-time step per sample."""
    tpl = template if template is not None else cfg.template
    c = cfg.constants
    n = cfg.length
    u0 = np.array(cfg.initial_state, dtype=np.float64)
    theta0 = math.atan2(u0[1], u0[0])
    switch, freqs = beat_schedule(cfg.rr_targets.intervals, n, theta0, cfg.sample_rate_hz, c.f_bar)
    dt_sample = 1.0 / (c.f_bar * cfg.sample_rate_hz)
    a, b, th = tpl.arrays()
    states, bad = _kernels.integrate(
        u0, n, int(cfg.oversample), dt_sample, switch, 2.0 * math.pi * freqs,
        a, b, th, c.A, c.f0, c.B0, c.B1, c.B2,
    )
    if bad >= 0:
        raise IntegrationDivergenceError(bad * dt_sample)
    return states, dt_sample


def synthesize(cfg: SynthesisConfig) -> EcgPpgPair:
    """Integrate the model and return min-max normalised ECG (``z``) and PPG (``v``)."""
    tpl = perturb_template(cfg.template, cfg.noise_rel_std, cfg.seed)
    states, _ = simulate_states(cfg, tpl)
    fs = cfg.sample_rate_hz
    ecg = minmax_normalize(Waveform(states[:, 2], fs))
    ppg = minmax_normalize(Waveform(states[:, 3], fs))
    return EcgPpgPair(ecg, ppg)


def gaussian_rr(mean_ms: float, std_ms: float, n_samples: int, sample_rate_hz: float, seed: int) -> RrSeries:
    """Integer-sample RR prescription drawn from N(mean, std) in ms, long enough to cover ``n_samples``."""
    if not mean_ms > 0 or std_ms < 0:
        raise DataError("need rr mean > 0 and std >= 0")
    rng = np.random.default_rng([int(seed), 0x5252])
    per_ms = sample_rate_hz / 1000.0
    n_beats = int(math.ceil(n_samples / (mean_ms * per_ms))) + 2
    out = []
    total = 0
    while total < n_samples + mean_ms * per_ms:
        ms = rng.normal(mean_ms, std_ms, n_beats)
        rr = np.maximum(np.rint(ms * per_ms), 2.0)
        out.append(rr)
        total += rr.sum()
    rr = np.concatenate(out)
    cut = int(np.searchsorted(np.cumsum(rr), n_samples)) + 2
    return RrSeries(rr[:cut], "samples", sample_rate_hz)


