"""Text file formats.

* waveform CSV: ``# fs_hz=<rate>`` comment, header ``index,value``
* pair CSV: same comment, header ``index,ecg,ppg``
* peak CSV: header ``index``
* RR CSV: header ``interval,unit`` (``# fs_hz=`` when unit is samples)

Floats are written with ``repr`` so a write/read cycle is lossless.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import DataError
from .peaks import PeakList, RrSeries
from .waveform import EcgPpgPair, Waveform


def atomic_write_text(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path):
    """Return (comment key/values, header, rows)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    meta = {}
    body = []
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            for part in s[1:].split(","):
                if "=" in part:
                    k, v = part.split("=", 1)
                    meta[k.strip()] = v.strip()
            continue
        body.append(line)
    if not body:
        raise DataError(f"{path}: no header row")
    rows = list(csv.reader(body))
    header = [h.strip() for h in rows[0]]
    return meta, header, rows[1:]


def _fs(meta, path, required=True):
    if "fs_hz" not in meta:
        if required:
            raise DataError(f"{path}: missing '# fs_hz=<rate>' comment line")
        return None
    try:
        return float(meta["fs_hz"])
    except ValueError:
        raise DataError(f"{path}: bad fs_hz value {meta['fs_hz']!r}") from None


def _columns(rows, header, names, path):
    for n in names:
        if n not in header:
            raise DataError(f"{path}: expected column {n!r}, header is {header}")
    idx = [header.index(n) for n in names]
    try:
        return [np.array([float(r[i]) for r in rows]) for i in idx]
    except (ValueError, IndexError) as exc:
        raise DataError(f"{path}: malformed row ({exc})") from None


def _format(fs, header, columns) -> str:
    buf = io.StringIO()
    if fs is not None:
        buf.write(f"# fs_hz={float(fs)!r}\n")
    buf.write(",".join(header) + "\n")
    for i, vals in enumerate(zip(*columns)):
        buf.write(",".join([str(i)] + [repr(float(v)) for v in vals]) + "\n")
    return buf.getvalue()


def format_waveform(w: Waveform) -> str:
    return _format(w.sample_rate_hz, ["index", "value"], [w.samples])


def write_waveform(w: Waveform, path) -> None:
    atomic_write_text(path, format_waveform(w))


def format_pair(p: EcgPpgPair) -> str:
    return _format(p.sample_rate_hz, ["index", "ecg", "ppg"], [p.ecg.samples, p.ppg.samples])


def write_pair(p: EcgPpgPair, path) -> None:
    atomic_write_text(path, format_pair(p))


def read_csv_kind(path) -> str:
    """``'pair'`` or ``'waveform'`` depending on the header."""
    _, header, _ = _read(path)
    if "ecg" in header and "ppg" in header:
        return "pair"
    if "value" in header:
        return "waveform"
    raise DataError(f"{path}: not a waveform or pair CSV (header {header})")


def read_waveform(path, channel: str | None = None) -> Waveform:
    """Read a waveform CSV, or one channel (``ecg``/``ppg``) of a pair CSV."""
    meta, header, rows = _read(path)
    fs = _fs(meta, path)
    if channel and channel in header:
        col = channel
    elif "value" in header:
        col = "value"
    else:
        raise DataError(f"{path}: no column {channel or 'value'!r} in header {header}")
    (vals,) = _columns(rows, header, [col], path)
    return Waveform(vals, fs)


def read_pair(path) -> EcgPpgPair:
    meta, header, rows = _read(path)
    fs = _fs(meta, path)
    ecg, ppg = _columns(rows, header, ["ecg", "ppg"], path)
    return EcgPpgPair.from_arrays(ecg, ppg, fs)


def write_peaks(p: PeakList, path) -> None:
    atomic_write_text(path, "index\n" + "".join(f"{int(i)}\n" for i in p.indices))


def read_peaks(path) -> np.ndarray:
    _, header, rows = _read(path)
    (idx,) = _columns(rows, header, ["index"], path)
    return idx.astype(np.int64)


def format_rr(rr: RrSeries) -> str:
    buf = io.StringIO()
    if rr.unit == "samples":
        buf.write(f"# fs_hz={rr.sample_rate_hz!r}\n")
    buf.write("interval,unit\n")
    for v in rr.intervals:
        buf.write(f"{float(v)!r},{rr.unit}\n")
    return buf.getvalue()


def write_rr(rr: RrSeries, path) -> None:
    atomic_write_text(path, format_rr(rr))


def read_rr(path) -> RrSeries:
    meta, header, rows = _read(path)
    for n in ("interval", "unit"):
        if n not in header:
            raise DataError(f"{path}: expected column {n!r}")
    if not rows:
        raise DataError(f"{path}: no intervals")
    ui = header.index("unit")
    units = {r[ui].strip() for r in rows}
    if len(units) != 1:
        raise DataError(f"{path}: mixed units {sorted(units)}")
    (vals,) = _columns(rows, header, ["interval"], path)
    unit = units.pop()
    return RrSeries(vals, unit, _fs(meta, path, required=unit == "samples"))


def write_json(obj, path) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read JSON {path}: {exc}") from None


def write_histograms(a, b, path) -> None:
    """Two unit histograms on a shared bin axis: ``bin,count_a,count_b``."""
    lo = min(a.origin, b.origin)
    hi = max(a.stop, b.stop)
    ca = np.zeros(hi - lo, dtype=np.int64)
    cb = np.zeros(hi - lo, dtype=np.int64)
    ca[a.origin - lo : a.stop - lo] = a.counts
    cb[b.origin - lo : b.stop - lo] = b.counts
    lines = ["bin,count_a,count_b"] + [f"{lo + i},{x},{y}" for i, (x, y) in enumerate(zip(ca, cb))]
    atomic_write_text(path, "\n".join(lines) + "\n")
