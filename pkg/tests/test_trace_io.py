"""Trace container, validation and the CSV/binary codecs."""

import io
from pathlib import Path

import numpy as np
import pytest

from eatmon import trace_io
from eatmon.errors import (
    InvalidTrace,
    MalformedHeader,
    NonFiniteValue,
    NonMonotoneTimestamps,
    TraceFormatError,
    WrongColumnCount,
)

FIXTURES = Path(__file__).parent / "fixtures"


def _trace(n=100, fs=500.0, with_phase=False, seed=0):
    rng = np.random.default_rng(seed)
    ts = np.arange(n) / fs
    amps = 10.0 + rng.uniform(0.0, 2.0, (n, 30))
    phases = rng.uniform(-np.pi, np.pi, (n, 30)) if with_phase else None
    return trace_io.CsiTrace(sample_rate_hz=fs, timestamps=ts,
                             amplitudes=amps, phases=phases,
                             meta={"origin": "test"})


def test_trace_arrays_read_only():
    tr = _trace()
    with pytest.raises(ValueError):
        tr.amplitudes[0, 0] = 1.0
    with pytest.raises(ValueError):
        tr.timestamps[0] = 1.0
    assert tr.n_samples == 100
    assert tr.duration_s == pytest.approx(99 / 500.0)


def test_trace_shape_validation():
    with pytest.raises(WrongColumnCount):
        trace_io.CsiTrace(sample_rate_hz=500.0, timestamps=np.arange(5) / 500.0,
                          amplitudes=np.zeros((5, 29)))
    with pytest.raises(InvalidTrace):
        trace_io.CsiTrace(sample_rate_hz=500.0, timestamps=np.arange(4) / 500.0,
                          amplitudes=np.zeros((5, 30)))


def test_validate_clean_trace_empty():
    assert trace_io.validate_trace(_trace()) == []


def test_validate_reports_each_violation():
    ts = np.arange(10) / 500.0
    amps = 10.0 * np.ones((10, 30))
    amps[3, 4] = -2.0
    tr = trace_io.CsiTrace(sample_rate_hz=500.0, timestamps=ts, amplitudes=amps)
    kinds = [v.kind for v in trace_io.validate_trace(tr)]
    assert kinds == ["negative_amplitude"]

    ts2 = ts.copy()
    ts2[6] = ts2[5]
    tr = trace_io.CsiTrace(sample_rate_hz=500.0, timestamps=ts2, amplitudes=np.abs(amps))
    violations = trace_io.validate_trace(tr)
    assert [v.kind for v in violations] == ["non_monotone"]
    assert violations[0].row == 7

    tr = trace_io.CsiTrace(sample_rate_hz=100.0, timestamps=ts, amplitudes=np.abs(amps))
    assert "sample_rate_mismatch" in [v.kind for v in trace_io.validate_trace(tr)]


def test_csv_roundtrip_bitwise(tmp_path):
    tr = _trace(seed=5)
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    trace_io.write_trace_csv(tr, p1)
    back = trace_io.read_trace_csv(p1)
    trace_io.write_trace_csv(back, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert back.amplitudes.tobytes() == tr.amplitudes.tobytes()
    assert back.meta == tr.meta


def test_csv_roundtrip_with_phase(tmp_path):
    tr = _trace(with_phase=True, seed=6)
    p = tmp_path / "p.csv"
    trace_io.write_trace_csv(tr, p)
    back = trace_io.read_trace_csv(p)
    assert back.phases is not None
    assert back.phases.tobytes() == tr.phases.tobytes()


def test_bin_roundtrip_bitwise(tmp_path):
    tr = _trace(with_phase=True, seed=7)
    p1 = tmp_path / "a.bin"
    p2 = tmp_path / "b.bin"
    trace_io.write_trace_bin(tr, p1)
    back = trace_io.read_trace_bin(p1)
    trace_io.write_trace_bin(back, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert back.timestamps.tobytes() == tr.timestamps.tobytes()


def test_csv_rate_inferred_when_missing():
    tr = _trace()
    buf = io.BytesIO()
    trace_io.write_trace_csv(tr, buf)
    text = buf.getvalue().decode()
    text = "\n".join(l for l in text.splitlines() if not l.startswith("# sample_rate_hz"))
    back = trace_io.read_trace_csv(io.BytesIO(text.encode()))
    assert back.sample_rate_hz == pytest.approx(500.0, rel=1e-9)


def test_streams_as_well_as_paths():
    tr = _trace()
    buf = io.BytesIO()
    trace_io.write_trace_bin(tr, buf)
    buf.seek(0)
    back = trace_io.read_trace_bin(buf)
    assert back.amplitudes.tobytes() == tr.amplitudes.tobytes()


MALFORMED = [
    ("bad_header.csv", MalformedHeader),
    ("comment_after_header.csv", MalformedHeader),
    ("no_header.csv", MalformedHeader),
    ("wrong_columns.csv", WrongColumnCount),
    ("non_numeric.csv", NonFiniteValue),
    ("nan_amplitude.csv", NonFiniteValue),
    ("nonmonotone.csv", NonMonotoneTimestamps),
    ("negative_amplitude.csv", InvalidTrace),
    ("bad_magic.bin", MalformedHeader),
    ("truncated.bin", MalformedHeader),
]


@pytest.mark.parametrize("name,exc", MALFORMED)
def test_malformed_fixture_raises_structured_error(name, exc):
    path = FIXTURES / name
    reader = trace_io.read_trace_bin if name.endswith(".bin") else trace_io.read_trace_csv
    with pytest.raises(exc) as info:
        reader(path)
    assert isinstance(info.value, TraceFormatError)
    assert str(info.value)


def test_malformed_errors_carry_positions():
    with pytest.raises(WrongColumnCount) as info:
        trace_io.read_trace_csv(FIXTURES / "wrong_columns.csv")
    assert info.value.row == 3
    with pytest.raises(NonFiniteValue) as info:
        trace_io.read_trace_csv(FIXTURES / "non_numeric.csv")
    assert info.value.row == 4
    assert info.value.col == 6
    with pytest.raises(NonFiniteValue) as info:
        trace_io.read_trace_csv(FIXTURES / "nan_amplitude.csv")
    assert info.value.row == 2
    assert info.value.col == 8
    with pytest.raises(NonMonotoneTimestamps) as info:
        trace_io.read_trace_csv(FIXTURES / "nonmonotone.csv")
    assert info.value.row == 5


def test_trailing_bytes_rejected(tmp_path):
    tr = _trace()
    p = tmp_path / "t.bin"
    trace_io.write_trace_bin(tr, p)
    p.write_bytes(p.read_bytes() + b"extra")
    with pytest.raises(MalformedHeader):
        trace_io.read_trace_bin(p)


def test_rate_not_inferrable():
    body = "t," + ",".join(f"a{i:02d}" for i in range(1, 31)) + "\n"
    body += ",".join(["0.0"] + ["1.0"] * 30) + "\n"
    with pytest.raises(MalformedHeader):
        trace_io.read_trace_csv(io.BytesIO(body.encode()))
