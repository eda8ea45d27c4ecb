import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pulsesynth import EcgPpgPair, PeakList, RrSeries, Waveform
from pulsesynth import io as pio
from pulsesynth.errors import DataError

finite = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=100, deadline=None)
@given(st.lists(finite, min_size=0, max_size=40), st.floats(1e-3, 1e5))
def test_waveform_round_trip_exact(tmp_path_factory, values, fs):
    path = tmp_path_factory.mktemp("w") / "w.csv"
    w = Waveform(values, fs)
    pio.write_waveform(w, path)
    back = pio.read_waveform(path)
    assert back.sample_rate_hz == fs
    assert back.samples.tobytes() == w.samples.tobytes()


def test_waveform_layout(tmp_path):
    pio.write_waveform(Waveform([0.5, -1.0], 125.0), tmp_path / "w.csv")
    assert (tmp_path / "w.csv").read_text().splitlines() == ["# fs_hz=125.0", "index,value", "0,0.5", "1,-1.0"]


def test_pair_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    pair = EcgPpgPair.from_arrays(rng.normal(size=50), rng.normal(size=50), 300.0)
    pio.write_pair(pair, tmp_path / "p.csv")
    back = pio.read_pair(tmp_path / "p.csv")
    assert np.array_equal(back.ecg.samples, pair.ecg.samples)
    assert np.array_equal(back.ppg.samples, pair.ppg.samples)
    assert pio.read_csv_kind(tmp_path / "p.csv") == "pair"
    assert np.array_equal(pio.read_waveform(tmp_path / "p.csv", "ppg").samples, pair.ppg.samples)
    assert (tmp_path / "p.csv").read_text().splitlines()[1] == "index,ecg,ppg"


def test_missing_rate(tmp_path):
    (tmp_path / "w.csv").write_text("index,value\n0,1.0\n")
    with pytest.raises(DataError, match="fs_hz"):
        pio.read_waveform(tmp_path / "w.csv")


def test_malformed_row(tmp_path):
    (tmp_path / "w.csv").write_text("# fs_hz=125\nindex,value\n0,abc\n")
    with pytest.raises(DataError):
        pio.read_waveform(tmp_path / "w.csv")


def test_missing_file(tmp_path):
    with pytest.raises(DataError):
        pio.read_pair(tmp_path / "absent.csv")


def test_rr_round_trip(tmp_path):
    for rr in (RrSeries([83.0, 84.0], "samples", 125.0), RrSeries([664.0, 672.5], "ms")):
        pio.write_rr(rr, tmp_path / "rr.csv")
        back = pio.read_rr(tmp_path / "rr.csv")
        assert back.unit == rr.unit and np.array_equal(back.intervals, rr.intervals)


def test_rr_mixed_units(tmp_path):
    (tmp_path / "rr.csv").write_text("# fs_hz=125\ninterval,unit\n83,samples\n664,ms\n")
    with pytest.raises(DataError, match="mixed"):
        pio.read_rr(tmp_path / "rr.csv")


def test_peaks_round_trip(tmp_path):
    pio.write_peaks(PeakList([3, 90, 180]), tmp_path / "k.csv")
    assert pio.read_peaks(tmp_path / "k.csv").tolist() == [3, 90, 180]


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "sub" / "out.txt"
    pio.atomic_write_text(target, "a")
    pio.atomic_write_text(target, "b")
    assert target.read_text() == "b"
    assert [p.name for p in target.parent.iterdir()] == ["out.txt"]
