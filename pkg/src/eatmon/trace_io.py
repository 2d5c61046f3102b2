"""Reading, writing and validation of CSI amplitude traces.

A trace is a fixed-rate stream of 30-subcarrier amplitude rows with
optional per-subcarrier phases. Two on-disk forms are supported:

* CSV: optional ``#`` comment lines (``# sample_rate_hz=<v>`` and
  ``# meta:<key>=<value>``), a header row ``t,a01..a30[,p01..p30]``,
  then one numeric row per sample. Floats are written with shortest
  round-trip precision, so read(write(trace)) is bitwise exact.
* binary: magic ``WIEC1``, little-endian u32 sample count, f64 sample
  rate, f64 timestamps, f64 amplitudes (row major), u8 phase flag and,
  if set, f64 phases. Metadata is not carried by the binary form.

Parsing is total: every input either yields a valid trace or raises a
``TraceFormatError`` subclass naming the offending row/column (data
rows and columns are numbered from 1).
"""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    InvalidTrace,
    MalformedHeader,
    NonFiniteValue,
    NonMonotoneTimestamps,
    WrongColumnCount,
)

N_SUBCARRIERS = 30

_MAGIC = b"WIEC1"
_RATE_TOLERANCE = 0.10


@dataclass(frozen=True)
class Violation:
    """One failed trace invariant; row/col are 1-based or None."""

    kind: str
    message: str
    row: int | None = None
    col: int | None = None


@dataclass(frozen=True)
class CsiTrace:
    """An immutable CSI amplitude trace.

    Attributes:
        sample_rate_hz: nominal packet rate of the capture.
        timestamps: shape (N,) strictly increasing seconds.
        amplitudes: shape (N, 30) non-negative subcarrier amplitudes.
        phases: optional shape (N, 30) phases in radians. Carried for
            completeness; no analysis stage consumes them.
        meta: free-form string metadata.
    """

    sample_rate_hz: float
    timestamps: np.ndarray
    amplitudes: np.ndarray
    phases: np.ndarray | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        ts = np.ascontiguousarray(self.timestamps, dtype=np.float64)
        amp = np.ascontiguousarray(self.amplitudes, dtype=np.float64)
        if amp.ndim != 2 or amp.shape[1] != N_SUBCARRIERS:
            raise WrongColumnCount(
                f"amplitudes must have {N_SUBCARRIERS} columns, got shape {amp.shape}"
            )
        if ts.ndim != 1 or ts.shape[0] != amp.shape[0]:
            raise InvalidTrace(
                f"timestamps length {ts.shape} does not match amplitude rows {amp.shape[0]}"
            )
        ph = self.phases
        if ph is not None:
            ph = np.ascontiguousarray(ph, dtype=np.float64)
            if ph.shape != amp.shape:
                raise InvalidTrace(f"phases shape {ph.shape} does not match amplitudes")
            ph.flags.writeable = False
        ts.flags.writeable = False
        amp.flags.writeable = False
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "phases", ph)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def n_samples(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def duration_s(self) -> float:
        if self.n_samples < 2:
            return 0.0
        return float(self.timestamps[-1] - self.timestamps[0])

    def with_amplitudes(self, amplitudes: np.ndarray) -> "CsiTrace":
        return replace(self, amplitudes=amplitudes)


def validate_trace(trace: CsiTrace) -> list[Violation]:
    """Check every trace invariant; returns one Violation per failure."""
    out: list[Violation] = []
    ts = trace.timestamps
    amp = trace.amplitudes
    if not trace.sample_rate_hz > 0:
        out.append(Violation("bad_sample_rate", f"sample_rate_hz={trace.sample_rate_hz!r} not positive"))
    bad_t = np.flatnonzero(~np.isfinite(ts))
    for i in bad_t[:16]:
        out.append(Violation("non_finite", f"timestamp at row {i + 1} not finite", row=int(i) + 1, col=1))
    if bad_t.size == 0 and ts.size >= 2:
        steps = np.diff(ts)
        bad_step = np.flatnonzero(steps <= 0)
        for i in bad_step[:16]:
            out.append(
                Violation(
                    "non_monotone",
                    f"timestamp at row {i + 2} does not increase",
                    row=int(i) + 2,
                    col=1,
                )
            )
    arrays = [("amplitude", amp, 2)]
    if trace.phases is not None:
        arrays.append(("phase", trace.phases, 2 + N_SUBCARRIERS))
    for name, arr, col0 in arrays:
        bad = np.argwhere(~np.isfinite(arr))
        for r, c in bad[:16]:
            out.append(
                Violation(
                    "non_finite",
                    f"{name} at row {r + 1}, subcarrier {c + 1} not finite",
                    row=int(r) + 1,
                    col=col0 + int(c),
                )
            )
    neg = np.argwhere(np.isfinite(amp) & (amp < 0))
    for r, c in neg[:16]:
        out.append(
            Violation(
                "negative_amplitude",
                f"amplitude at row {r + 1}, subcarrier {c + 1} is negative",
                row=int(r) + 1,
                col=2 + int(c),
            )
        )
    if ts.size >= 2 and bad_t.size == 0 and trace.sample_rate_hz > 0:
        span = float(ts[-1] - ts[0])
        if span > 0:
            mean_dt = span / (ts.size - 1)
            nominal = 1.0 / trace.sample_rate_hz
            if abs(mean_dt - nominal) > _RATE_TOLERANCE * nominal:
                out.append(
                    Violation(
                        "sample_rate_mismatch",
                        f"mean interval {mean_dt:.6g}s deviates more than 10% from 1/{trace.sample_rate_hz:.6g}s",
                    )
                )
    return out


def _raise_first(violations: list[Violation]) -> None:
    if not violations:
        return
    v = violations[0]
    if v.kind == "non_finite":
        raise NonFiniteValue(v.message, row=v.row, col=v.col)
    if v.kind == "non_monotone":
        raise NonMonotoneTimestamps(v.message, row=v.row, col=v.col)
    raise InvalidTrace(v.message, violations=violations)


def _expected_header(with_phase: bool) -> str:
    cols = ["t"] + [f"a{i:02d}" for i in range(1, N_SUBCARRIERS + 1)]
    if with_phase:
        cols += [f"p{i:02d}" for i in range(1, N_SUBCARRIERS + 1)]
    return ",".join(cols)


def _open_for_read(source) -> io.BufferedIOBase:
    if hasattr(source, "read"):
        return source
    return open(source, "rb")


def _open_for_write(sink) -> tuple[io.BufferedIOBase, bool]:
    if hasattr(sink, "write"):
        return sink, False
    return open(sink, "wb"), True


def read_trace_csv(source) -> CsiTrace:
    """Parse a CSV trace from a path or binary stream.

    Raises MalformedHeader, WrongColumnCount, NonFiniteValue,
    NonMonotoneTimestamps or InvalidTrace; never returns a trace that
    fails validate_trace.
    """
    stream = _open_for_read(source)
    close = stream is not source
    try:
        raw = stream.read()
    finally:
        if close:
            stream.close()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedHeader(f"trace file is not valid UTF-8 text: {exc}") from None

    declared_rate: float | None = None
    meta: dict[str, str] = {}
    header: str | None = None
    data_lines: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if header is not None:
                raise MalformedHeader("comment lines must precede the header")
            body = stripped[1:].strip()
            if body.startswith("sample_rate_hz="):
                try:
                    declared_rate = float(body.split("=", 1)[1])
                except ValueError:
                    raise MalformedHeader(f"unparseable sample rate comment: {stripped!r}") from None
            elif body.startswith("meta:") and "=" in body:
                key, value = body[len("meta:"):].split("=", 1)
                meta[key] = value
            continue
        if header is None:
            header = stripped
        else:
            data_lines.append(stripped)

    if header is None:
        raise MalformedHeader("no header row found")
    if header == _expected_header(with_phase=False):
        has_phase = False
    elif header == _expected_header(with_phase=True):
        has_phase = True
    else:
        raise MalformedHeader(f"unrecognised header {header!r}")

    n_cols = 1 + N_SUBCARRIERS * (2 if has_phase else 1)
    n = len(data_lines)
    values = np.empty((n, n_cols), dtype=np.float64)
    for r, line in enumerate(data_lines):
        parts = line.split(",")
        if len(parts) != n_cols:
            raise WrongColumnCount(
                f"row {r + 1} has {len(parts)} columns, expected {n_cols}",
                row=r + 1,
            )
        try:
            values[r] = [float(p) for p in parts]
        except ValueError:
            for c, p in enumerate(parts):
                try:
                    float(p)
                except ValueError:
                    raise NonFiniteValue(
                        f"row {r + 1}, column {c + 1}: {p!r} is not a number",
                        row=r + 1,
                        col=c + 1,
                    ) from None
            raise

    timestamps = values[:, 0]
    amplitudes = values[:, 1 : 1 + N_SUBCARRIERS]
    phases = values[:, 1 + N_SUBCARRIERS :] if has_phase else None

    if declared_rate is not None:
        rate = declared_rate
    elif n >= 2 and np.all(np.isfinite(timestamps)) and timestamps[-1] > timestamps[0]:
        rate = (n - 1) / float(timestamps[-1] - timestamps[0])
    else:
        raise MalformedHeader("sample rate not declared and not inferrable from timestamps")

    trace = CsiTrace(
        sample_rate_hz=rate,
        timestamps=timestamps,
        amplitudes=amplitudes,
        phases=phases,
        meta=meta,
    )
    _raise_first(validate_trace(trace))
    return trace


def write_trace_csv(trace: CsiTrace, sink) -> None:
    """Write a validated trace as CSV to a path or binary stream."""
    _raise_first(validate_trace(trace))
    lines = [f"# sample_rate_hz={trace.sample_rate_hz!r}"]
    for key in sorted(trace.meta):
        lines.append(f"# meta:{key}={trace.meta[key]}")
    has_phase = trace.phases is not None
    lines.append(_expected_header(has_phase))
    for r in range(trace.n_samples):
        row = [repr(float(trace.timestamps[r]))]
        row += [repr(float(v)) for v in trace.amplitudes[r]]
        if has_phase:
            row += [repr(float(v)) for v in trace.phases[r]]
        lines.append(",".join(row))
    payload = ("\n".join(lines) + "\n").encode("utf-8")
    stream, close = _open_for_write(sink)
    try:
        stream.write(payload)
    finally:
        if close:
            stream.close()


def write_trace_bin(trace: CsiTrace, sink) -> None:
    """Write the binary form (metadata is dropped)."""
    _raise_first(validate_trace(trace))
    n = trace.n_samples
    parts = [
        _MAGIC,
        struct.pack("<I", n),
        struct.pack("<d", float(trace.sample_rate_hz)),
        np.ascontiguousarray(trace.timestamps, dtype="<f8").tobytes(),
        np.ascontiguousarray(trace.amplitudes, dtype="<f8").tobytes(),
        struct.pack("<B", 1 if trace.phases is not None else 0),
    ]
    if trace.phases is not None:
        parts.append(np.ascontiguousarray(trace.phases, dtype="<f8").tobytes())
    stream, close = _open_for_write(sink)
    try:
        stream.write(b"".join(parts))
    finally:
        if close:
            stream.close()


def read_trace_bin(source) -> CsiTrace:
    """Parse the binary form from a path or binary stream."""
    stream = _open_for_read(source)
    close = stream is not source
    try:
        raw = stream.read()
    finally:
        if close:
            stream.close()
    if len(raw) < len(_MAGIC) + 4 + 8 or raw[: len(_MAGIC)] != _MAGIC:
        raise MalformedHeader("missing or wrong magic bytes")
    off = len(_MAGIC)
    (n,) = struct.unpack_from("<I", raw, off)
    off += 4
    (rate,) = struct.unpack_from("<d", raw, off)
    off += 8

    def take(count: int, what: str) -> np.ndarray:
        nonlocal off
        nbytes = count * 8
        if off + nbytes > len(raw):
            raise MalformedHeader(f"truncated file while reading {what}")
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=off).astype(np.float64)
        off += nbytes
        return arr

    timestamps = take(n, "timestamps")
    amplitudes = take(n * N_SUBCARRIERS, "amplitudes").reshape(n, N_SUBCARRIERS)
    if off + 1 > len(raw):
        raise MalformedHeader("truncated file while reading phase flag")
    has_phase = raw[off]
    off += 1
    if has_phase not in (0, 1):
        raise MalformedHeader(f"phase flag must be 0 or 1, got {has_phase}")
    phases = take(n * N_SUBCARRIERS, "phases").reshape(n, N_SUBCARRIERS) if has_phase else None
    if off != len(raw):
        raise MalformedHeader(f"{len(raw) - off} trailing bytes after trace payload")
    trace = CsiTrace(
        sample_rate_hz=rate,
        timestamps=timestamps,
        amplitudes=amplitudes,
        phases=phases,
    )
    _raise_first(validate_trace(trace))
    return trace
