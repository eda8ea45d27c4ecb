"""``pulsesynth`` command line.

Exit codes: 0 success, 2 usage error, 3 data/validation error, 4 numerical
failure. Every command writes a run manifest next to its main output.
"""
from __future__ import annotations

import argparse
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from . import io as pio
from .errors import BandSpecificationError, DataError, NumericalError
from .metrics import compare_rr, frechet_distance, segment_features, unit_histogram, waveform_rmse, MetricReport
from .peaks import find_peaks, rr_from_peaks
from .preprocess import ECG_BAND, PPG_BAND, align_first_peaks, bandpass, check_band, minmax_normalize, resample
from .synth import PRESETS, RhythmTemplate, SynthesisConfig, gaussian_rr, load_template, preset, synthesize
from .waveform import EcgPpgPair

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4
SEED_ENV = "PULSESYNTH_SEED"


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def write_manifest(out: Path, command: str, parameters: dict, seed: int | None, path: str | None = None) -> Path:
    target = Path(path) if path else manifest_path(out)
    pio.write_json(
        {
            "command": command,
            "parameters": parameters,
            "seed": seed,
            "tool_version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
        target,
    )
    return target


def parse_band(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"band must look like LO:HI, got {text!r}") from None
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError(f"band needs 0 < LO < HI, got {text!r}")
    return lo, hi


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


# -- synth -------------------------------------------------------------------

SYNTH_KEYS = ("rhythm", "template", "sample_rate_hz", "duration_s", "rr_file", "rr_mean_ms",
              "rr_std_ms", "noise_rel_std", "seed", "oversample")


def synth_parameters(args) -> dict:
    if args.from_manifest:
        data = pio.read_json(args.from_manifest)
        params = data.get("parameters", data)
        unknown = set(params) - set(SYNTH_KEYS)
        if unknown:
            raise DataError(f"{args.from_manifest}: unknown synthesis keys {sorted(unknown)}")
        params = dict(params)
        params.setdefault("sample_rate_hz", 125.0)
        params.setdefault("noise_rel_std", 0.0)
        params.setdefault("oversample", 8)
        if params.get("seed") is None:
            params["seed"] = default_seed()
        return params
    if args.rr_file and args.duration_s is not None:
        raise UsageError("--rr-file and --duration-s are mutually exclusive")
    if not args.rr_file and args.duration_s is None:
        raise UsageError("give either --rr-file or --duration-s with --rr-mean-ms")
    if args.duration_s is not None and args.rr_mean_ms is None:
        raise UsageError("--duration-s needs --rr-mean-ms")
    if args.rr_file and (args.rr_mean_ms is not None or args.rr_std_ms is not None):
        raise UsageError("--rr-mean-ms/--rr-std-ms cannot be combined with --rr-file")
    if (args.rhythm is None) == (args.template is None):
        raise UsageError("give exactly one of --rhythm or --template")
    params = {
        "sample_rate_hz": args.fs,
        "noise_rel_std": args.noise_rel_std,
        "seed": args.seed if args.seed is not None else default_seed(),
        "oversample": args.oversample,
    }
    if args.rhythm:
        params["rhythm"] = args.rhythm.upper()
    else:
        params["template"] = load_template(args.template).to_dict()
    if args.rr_file:
        params["rr_file"] = str(args.rr_file)
    else:
        params["duration_s"] = args.duration_s
        params["rr_mean_ms"] = args.rr_mean_ms
        params["rr_std_ms"] = args.rr_std_ms if args.rr_std_ms is not None else 0.0
    return params


def config_from_parameters(p: dict) -> SynthesisConfig:
    if ("rhythm" in p) == ("template" in p):
        raise DataError("manifest must name exactly one of 'rhythm' or 'template'")
    if "rhythm" in p:
        try:
            template = preset(p["rhythm"])
        except KeyError as exc:
            raise DataError(str(exc)) from None
    else:
        template = RhythmTemplate.from_dict(p["template"])
    fs = float(p["sample_rate_hz"])
    seed = int(p["seed"])
    if "rr_file" in p:
        rr = pio.read_rr(p["rr_file"]).to_samples(fs)
        n = None
    else:
        if p.get("duration_s") is None or p.get("rr_mean_ms") is None:
            raise DataError("manifest needs either rr_file or duration_s + rr_mean_ms")
        n = int(round(float(p["duration_s"]) * fs))
        if n < 1:
            raise DataError("duration_s too short for one sample")
        rr = gaussian_rr(float(p["rr_mean_ms"]), float(p.get("rr_std_ms", 0.0)), n, fs, seed)
    return SynthesisConfig(
        template=template,
        rr_targets=rr,
        sample_rate_hz=fs,
        oversample=int(p["oversample"]),
        noise_rel_std=float(p["noise_rel_std"]),
        seed=seed,
        n_samples=n,
    )


def cmd_synth(args) -> int:
    params = synth_parameters(args)
    cfg = config_from_parameters(params)
    pair = synthesize(cfg)
    out = Path(args.out)
    pio.write_pair(pair, out)
    if args.rr_out:
        pio.write_rr(cfg.rr_targets, args.rr_out)
    write_manifest(out, "synth", params, params["seed"], args.manifest)
    print(f"wrote {out} ({len(pair)} samples per channel at {cfg.sample_rate_hz:g} Hz)")
    return 0


# -- preprocess --------------------------------------------------------------

def cmd_preprocess(args) -> int:
    pair = pio.read_pair(args.input)
    fs = pair.sample_rate_hz
    try:
        check_band(*args.ecg_band, fs)
        check_band(*args.ppg_band, fs)
    except BandSpecificationError as exc:
        raise UsageError(str(exc)) from None
    ecg = bandpass(pair.ecg, *args.ecg_band)
    ppg = bandpass(pair.ppg, *args.ppg_band)
    if args.resample_hz:
        ecg = resample(ecg, args.resample_hz)
        ppg = resample(ppg, args.resample_hz)
    pair = EcgPpgPair(ecg, ppg)
    if args.align:
        pair = align_first_peaks(pair, args.min_distance)
    if args.normalize:
        pair = EcgPpgPair(minmax_normalize(pair.ecg), minmax_normalize(pair.ppg))
    out = Path(args.out)
    pio.write_pair(pair, out)
    params = {
        "input": str(args.input),
        "ecg_band": list(args.ecg_band),
        "ppg_band": list(args.ppg_band),
        "resample_hz": args.resample_hz,
        "align": args.align,
        "min_distance": args.min_distance,
        "normalize": args.normalize,
    }
    write_manifest(out, "preprocess", params, None, args.manifest)
    print(f"wrote {out} ({len(pair)} samples at {pair.sample_rate_hz:g} Hz)")
    return 0


# -- peaks -------------------------------------------------------------------

def cmd_peaks(args) -> int:
    w = pio.read_waveform(args.input, args.channel)
    peaks = find_peaks(w, args.min_distance, args.prominence)
    rr = rr_from_peaks(peaks, w.sample_rate_hz)
    if args.rr_unit == "ms":
        rr = rr.to_ms()
    out_peaks = Path(args.out_peaks)
    pio.write_peaks(peaks, out_peaks)
    pio.write_rr(rr, args.out_rr)
    params = {
        "input": str(args.input),
        "channel": args.channel,
        "min_distance": args.min_distance,
        "prominence": args.prominence,
        "rr_unit": args.rr_unit,
    }
    write_manifest(out_peaks, "peaks", params, None, args.manifest)
    print(f"{len(peaks)} peaks, {len(rr)} intervals")
    return 0


# -- metrics -----------------------------------------------------------------

def _emit_report(report: MetricReport, args, params: dict) -> int:
    text = report.to_json()
    if args.out:
        out = Path(args.out)
        pio.atomic_write_text(out, text)
        write_manifest(out, f"metrics {args.kind}", params, None, args.manifest)
    sys.stdout.write(text)
    return 0


def cmd_metrics_rr(args) -> int:
    a = pio.read_rr(args.a)
    b = pio.read_rr(args.b)
    if a.unit != b.unit:
        raise UsageError(f"RR unit mismatch: {args.a} is {a.unit}, {args.b} is {b.unit}")
    inputs = {"a": str(args.a), "b": str(args.b), "bin_width": 1,
              "pairing": "chronological, truncated to the shorter series", "kl_log": "natural"}
    report = compare_rr(a, b, inputs)
    if args.emit_hist:
        pio.write_histograms(unit_histogram(a), unit_histogram(b), args.emit_hist)
    return _emit_report(report, args, {"a": str(args.a), "b": str(args.b), "emit_hist": str(args.emit_hist) if args.emit_hist else None})


def cmd_metrics_waveform(args) -> int:
    a = pio.read_waveform(args.a, args.channel)
    b = pio.read_waveform(args.b, args.channel)
    report = MetricReport(waveform_rmse=waveform_rmse(a, b),
                          inputs={"a": str(args.a), "b": str(args.b), "channel": args.channel})
    return _emit_report(report, args, {"a": str(args.a), "b": str(args.b), "channel": args.channel})


def cmd_metrics_fd(args) -> int:
    a = pio.read_waveform(args.a, args.channel)
    b = pio.read_waveform(args.b, args.channel)
    fd = frechet_distance(segment_features(a, args.window, args.overlap),
                          segment_features(b, args.window, args.overlap))
    params = {"a": str(args.a), "b": str(args.b), "channel": args.channel,
              "window": args.window, "overlap": args.overlap}
    report = MetricReport(fd=fd, inputs=dict(params, features="10-dim segment descriptor"))
    return _emit_report(report, args, params)


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pulsesynth", description="Synthetic ECG/PPG toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesise a paired ECG/PPG recording")
    s.add_argument("--rhythm", type=str.upper, choices=sorted(PRESETS))
    s.add_argument("--template", type=Path, help="rhythm template JSON {name, a, b, theta}")
    s.add_argument("--duration-s", type=float)
    s.add_argument("--rr-mean-ms", type=float)
    s.add_argument("--rr-std-ms", type=float)
    s.add_argument("--rr-file", type=Path)
    s.add_argument("--fs", type=float, default=125.0)
    s.add_argument("--oversample", type=positive_int, default=8)
    s.add_argument("--noise-rel-std", type=float, default=0.0)
    s.add_argument("--seed", type=int)
    s.add_argument("--from-manifest", type=Path, help="re-run from a synthesis or run manifest")
    s.add_argument("--out", type=Path, required=True)
    s.add_argument("--rr-out", type=Path, help="also write the prescribed RR series")
    s.add_argument("--manifest", type=Path)
    s.set_defaults(func=cmd_synth)

    p = sub.add_parser("preprocess", help="filter, resample, align and normalise a pair CSV")
    p.add_argument("input", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--ecg-band", type=parse_band, default=ECG_BAND)
    p.add_argument("--ppg-band", type=parse_band, default=PPG_BAND)
    p.add_argument("--resample-hz", type=float)
    p.add_argument("--align", action="store_true")
    p.add_argument("--min-distance", type=positive_int, default=50)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--manifest", type=Path)
    p.set_defaults(func=cmd_preprocess)

    k = sub.add_parser("peaks", help="detect peaks and derive RR intervals")
    k.add_argument("input", type=Path)
    k.add_argument("--channel", choices=("ecg", "ppg"), default="ecg")
    k.add_argument("--min-distance", type=positive_int, default=50)
    k.add_argument("--prominence", type=float, default=0.0)
    k.add_argument("--out-peaks", type=Path, required=True)
    k.add_argument("--out-rr", type=Path, required=True)
    k.add_argument("--rr-unit", choices=("samples", "ms"), default="samples")
    k.add_argument("--manifest", type=Path)
    k.set_defaults(func=cmd_peaks)

    m = sub.add_parser("metrics", help="compare RR series or waveforms")
    msub = m.add_subparsers(dest="kind", required=True)
    for name, func, helptext in (
        ("rr", cmd_metrics_rr, "RR distribution metrics between two RR CSVs"),
        ("waveform", cmd_metrics_waveform, "RMSE between two equal-length signals"),
        ("fd", cmd_metrics_fd, "Frechet distance over segment features"),
    ):
        q = msub.add_parser(name, help=helptext)
        q.add_argument("a", type=Path)
        q.add_argument("b", type=Path)
        q.add_argument("--out", type=Path)
        q.add_argument("--manifest", type=Path)
        if name == "rr":
            q.add_argument("--emit-hist", type=Path, help="write shared-axis unit histograms as CSV")
        else:
            q.add_argument("--channel", choices=("ecg", "ppg"), default="ecg")
        if name == "fd":
            q.add_argument("--window", type=positive_int, default=512)
            q.add_argument("--overlap", type=float, default=0.5)
        q.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pulsesynth: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"pulsesynth: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DataError as exc:
        print(f"pulsesynth: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
