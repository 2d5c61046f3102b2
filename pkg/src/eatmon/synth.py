"""Synthetic CSI trace generator with exact ground truth.

Replaces NIC captures for development and testing. The motion signal is
built per event on a common time grid and coupled into the 30
subcarriers through a gain profile, on top of per-subcarrier static
baselines, white noise and optional outlier spikes.

Event waveforms:

* delivery: a Gaussian-windowed burst whose carrier sits in the
  0.3-0.8 Hz hand-motion band. Utensil identity is encoded in the shape
  parameters (carrier frequency, envelope width, envelope asymmetry,
  base amplitude; see _UTENSIL_SHAPES); per-event jitter keeps classes
  separable without making them point masses.
* chew_burst: a sinusoid at rate_hz (0.8-3 Hz) lasting count/rate_hz
  seconds with short raised-cosine onset/offset ramps, at roughly 10%
  of the delivery amplitude. Chew k peaks at (k + 0.25)/rate_hz after
  burst start.
* swallow: an asymmetric raised-cosine bump with a fast rise (laryngeal
  elevation, 0.25 s) and a slow relaxation (1.0 s). The bulk excursion
  is larger than a chew cycle, but most of its energy sits below the
  chewing band, so the band-passed waveform shows the swallow as a
  peak that is smaller and wider than the chew peaks around it.
* non_eating: a broadband colored-noise burst inside 0.1-8 Hz with
  label-specific amplitude, duration and sub-band (walk, sit, stand,
  read, type).

chew_burst and swallow events must lie in the aftermath of a delivery
(after its burst ends and before the next large activity starts);
deliveries and non-eating activities must not overlap each other.
Generation is deterministic for a fixed scenario and seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .errors import InvalidScenario
from .segmentation import ActivitySegment
from .trace_io import N_SUBCARRIERS, CsiTrace

UTENSILS = ("fork", "knife_fork", "spoon", "hand")
NON_EATING_LABELS = ("walk", "sit", "stand", "read", "type")

CHEW_RATE_MIN_HZ = 0.8
CHEW_RATE_MAX_HZ = 3.0

# amplitude ratios relative to the delivery burst
CHEW_AMP_RATIO = 0.10
SWALLOW_AMP_RATIO = 2.2  # of the chew amplitude; raw bulk motion, not band peak
SWALLOW_RISE_S = 0.25  # laryngeal elevation time
SWALLOW_FALL_S = 1.00  # relaxation time
SWALLOW_DUR_S = SWALLOW_RISE_S + SWALLOW_FALL_S

_GAUSS_TRUNC = 2.5
_FREQ_JITTER = 0.03
_WIDTH_JITTER = 0.04
_AMP_JITTER = 0.03  # delivery support half-width in envelope widths
_DELIVERY_RMS = 0.41  # per-event waveform RMS over the support


@dataclass(frozen=True)
class _Shape:
    freq_hz: float
    width_s: float
    asym: float
    amp: float
    harm: float


_UTENSIL_SHAPES = {
    "fork": _Shape(freq_hz=0.74, width_s=0.50, asym=0.00, amp=1.00, harm=0.00),
    "knife_fork": _Shape(freq_hz=0.30, width_s=0.50, asym=0.25, amp=1.30, harm=0.25),
    "spoon": _Shape(freq_hz=0.30, width_s=0.50, asym=-0.20, amp=0.95, harm=0.12),
    "hand": _Shape(freq_hz=0.44, width_s=0.50, asym=0.30, amp=1.12, harm=0.50),
}

# label -> (amplitude, default duration s, band low Hz, band high Hz)
_NON_EATING_SHAPES = {
    "walk": (0.60, 5.0, 1.5, 12.0),
    "sit": (0.55, 2.0, 1.5, 12.0),
    "stand": (0.55, 2.0, 1.5, 12.0),
    "read": (0.45, 6.0, 1.5, 8.0),
    "type": (0.50, 6.0, 2.0, 12.0),
}


@dataclass(frozen=True)
class ActivityEvent:
    """One scripted activity. Fields beyond kind/start_s are kind
    specific; amplitude scales the waveform relative to its default."""

    kind: str
    start_s: float
    utensil: str | None = None
    rate_hz: float | None = None
    count: int | None = None
    label: str | None = None
    duration_s: float | None = None
    amplitude: float | None = None


def delivery(start_s: float, utensil: str, amplitude: float | None = None) -> ActivityEvent:
    return ActivityEvent(kind="delivery", start_s=start_s, utensil=utensil, amplitude=amplitude)


def chew_burst(start_s: float, rate_hz: float, count: int,
               amplitude: float | None = None) -> ActivityEvent:
    return ActivityEvent(kind="chew_burst", start_s=start_s, rate_hz=rate_hz,
                         count=count, amplitude=amplitude)


def swallow(start_s: float, rate_hz: float | None = None,
            amplitude: float | None = None) -> ActivityEvent:
    return ActivityEvent(kind="swallow", start_s=start_s, rate_hz=rate_hz, amplitude=amplitude)


def non_eating(start_s: float, label: str, duration_s: float | None = None,
               amplitude: float | None = None) -> ActivityEvent:
    return ActivityEvent(kind="non_eating", start_s=start_s, label=label,
                         duration_s=duration_s, amplitude=amplitude)


def default_subcarrier_gains() -> tuple[float, ...]:
    idx = np.arange(N_SUBCARRIERS)
    gains = 0.3 + 0.7 * np.sin(np.pi * (idx + 2) / 31.0) ** 2
    return tuple(float(g) for g in gains)


def _baselines() -> np.ndarray:
    idx = np.arange(N_SUBCARRIERS)
    return 14.0 + 3.0 * np.sin(2.0 * np.pi * idx / 30.0 * 1.3 + 0.7)


@dataclass(frozen=True)
class SynthScenario:
    duration_s: float
    sample_rate_hz: float = 500.0
    seed: int = 0
    noise_std: float = 0.05
    outlier_rate_hz: float = 0.0
    subcarrier_gains: tuple[float, ...] = field(default_factory=default_subcarrier_gains)
    events: tuple[ActivityEvent, ...] = ()


@dataclass(frozen=True)
class IntervalTruth:
    """Ground truth for one inter-delivery interval."""

    start_s: float
    end_s: float
    chew_count: int
    swallow_count: int
    chew_rate_hz: float | None


@dataclass(frozen=True)
class GroundTruth:
    segments: list[tuple[ActivitySegment, str]]
    chew_times_s: list[float]
    swallow_times_s: list[float]
    intervals: list[IntervalTruth]


def _nominal_support(ev: ActivityEvent) -> tuple[float, float]:
    if ev.kind == "delivery":
        shape = _UTENSIL_SHAPES[ev.utensil]
        return ev.start_s, ev.start_s + 2.0 * _GAUSS_TRUNC * shape.width_s
    if ev.kind == "chew_burst":
        return ev.start_s, ev.start_s + ev.count / ev.rate_hz
    if ev.kind == "swallow":
        return ev.start_s, ev.start_s + SWALLOW_DUR_S
    shape = _NON_EATING_SHAPES[ev.label]
    dur = ev.duration_s if ev.duration_s is not None else shape[1]
    return ev.start_s, ev.start_s + dur


def validate_scenario(scenario: SynthScenario) -> None:
    """Structural checks; raises InvalidScenario on the first failure."""
    if scenario.duration_s <= 0:
        raise InvalidScenario(f"duration_s must be positive, got {scenario.duration_s}")
    if scenario.sample_rate_hz <= 0:
        raise InvalidScenario(f"sample_rate_hz must be positive, got {scenario.sample_rate_hz}")
    if scenario.noise_std < 0:
        raise InvalidScenario(f"noise_std must be >= 0, got {scenario.noise_std}")
    if scenario.outlier_rate_hz < 0:
        raise InvalidScenario(f"outlier_rate_hz must be >= 0, got {scenario.outlier_rate_hz}")
    gains = np.asarray(scenario.subcarrier_gains, dtype=np.float64)
    if gains.shape != (N_SUBCARRIERS,):
        raise InvalidScenario(f"subcarrier_gains must have {N_SUBCARRIERS} entries")
    if np.any(gains < 0) or np.any(gains > 1):
        raise InvalidScenario("subcarrier_gains must lie in [0, 1]")

    for ev in scenario.events:
        if ev.kind == "delivery":
            if ev.utensil not in UTENSILS:
                raise InvalidScenario(f"unknown utensil {ev.utensil!r}")
        elif ev.kind == "chew_burst":
            if ev.rate_hz is None or not (CHEW_RATE_MIN_HZ <= ev.rate_hz <= CHEW_RATE_MAX_HZ):
                raise InvalidScenario(
                    f"chew rate must lie in [{CHEW_RATE_MIN_HZ}, {CHEW_RATE_MAX_HZ}] Hz, got {ev.rate_hz}"
                )
            if ev.count is None or ev.count < 1:
                raise InvalidScenario(f"chew count must be >= 1, got {ev.count}")
        elif ev.kind == "swallow":
            if ev.rate_hz is not None and not (CHEW_RATE_MIN_HZ <= ev.rate_hz <= CHEW_RATE_MAX_HZ):
                raise InvalidScenario(f"swallow reference rate out of range: {ev.rate_hz}")
        elif ev.kind == "non_eating":
            if ev.label not in NON_EATING_LABELS:
                raise InvalidScenario(f"unknown non-eating label {ev.label!r}")
            if ev.duration_s is not None and ev.duration_s <= 0:
                raise InvalidScenario(f"duration_s must be positive, got {ev.duration_s}")
        else:
            raise InvalidScenario(f"unknown event kind {ev.kind!r}")
        if ev.amplitude is not None and ev.amplitude <= 0:
            raise InvalidScenario(f"amplitude must be positive, got {ev.amplitude}")

    events = sorted(scenario.events, key=lambda e: (e.start_s, e.kind))
    large = []
    for ev in events:
        lo, hi = _nominal_support(ev)
        if lo < -1e-9 or hi > scenario.duration_s + 1e-9:
            raise InvalidScenario(
                f"{ev.kind} at {ev.start_s}s extends to {hi:.2f}s, outside [0, {scenario.duration_s}]"
            )
        if ev.kind in ("delivery", "non_eating"):
            large.append((lo, hi, ev.kind))
    large.sort()
    for (lo0, hi0, k0), (lo1, hi1, k1) in zip(large, large[1:]):
        if lo1 < hi0 - 1e-9:
            raise InvalidScenario(f"{k0} and {k1} activities overlap near {lo1:.2f}s")

    deliveries = [(lo, hi) for lo, hi, k in large if k == "delivery"]
    for ev in events:
        if ev.kind not in ("chew_burst", "swallow"):
            continue
        lo, hi = _nominal_support(ev)
        host = None
        for d_lo, d_hi in deliveries:
            if d_hi <= lo + 1e-9:
                host = (d_lo, d_hi)
        if host is None:
            raise InvalidScenario(f"{ev.kind} at {ev.start_s}s has no preceding delivery")
        nxt = scenario.duration_s
        for l_lo, l_hi, _ in large:
            if l_lo > host[1] + 1e-9:
                nxt = min(nxt, l_lo)
        if hi > nxt + 1e-9:
            raise InvalidScenario(
                f"{ev.kind} at {ev.start_s}s crosses into the next activity at {nxt:.2f}s"
            )


def _add_delivery(motion: np.ndarray, t: np.ndarray, ev: ActivityEvent,
                  rng: np.random.Generator) -> tuple[float, float]:
    shape = _UTENSIL_SHAPES[ev.utensil]
    z = rng.standard_normal(3)
    freq = float(np.clip(shape.freq_hz * (1.0 + _FREQ_JITTER * z[0]), 0.3, 0.8))
    width = float(np.clip(shape.width_s * (1.0 + _WIDTH_JITTER * z[1]), 0.25, 0.60))
    amp = shape.amp * (1.0 + _AMP_JITTER * z[2]) * (ev.amplitude if ev.amplitude is not None else 1.0)
    amp = max(amp, 0.5)
    phase = rng.uniform(0.0, 2.0 * np.pi)

    start = ev.start_s
    end = start + 2.0 * _GAUSS_TRUNC * width
    center = start + _GAUSS_TRUNC * width
    sel = (t >= start) & (t < end)
    tau = t[sel] - center
    env = np.exp(-0.5 * (tau / width) ** 2) * (1.0 + shape.asym * np.tanh(tau / width))
    # second harmonic keeps the burst visible to short-window variance
    # statistics even for the slowest carriers; it stays inside the
    # 0.3-0.8 Hz hand-motion band
    harmonic = min(0.8, 2.0 * freq)
    carrier = np.sin(2.0 * np.pi * freq * tau + phase)
    carrier += shape.harm * np.sin(2.0 * np.pi * harmonic * tau + 1.3 * phase)
    wave = env * carrier
    # the hand returns to rest, so the burst carries no net level shift;
    # cancel the sum with an envelope-shaped correction to keep tapering
    denom = float(env.sum())
    if denom > 0.0:
        wave = wave - (float(wave.sum()) / denom) * env
    # deliveries have stereotyped motion energy regardless of where the
    # carrier phase lands under the envelope
    rms = float(np.sqrt(np.mean(wave ** 2)))
    if rms > 1e-12:
        wave = wave * (_DELIVERY_RMS / rms)
    motion[sel] += amp * wave
    return start, end


def _add_chews(motion: np.ndarray, t: np.ndarray, ev: ActivityEvent,
               rng: np.random.Generator) -> list[float]:
    amp = CHEW_AMP_RATIO * (ev.amplitude if ev.amplitude is not None else 1.0)
    amp *= 1.0 + 0.05 * rng.standard_normal()
    rate = ev.rate_hz
    dur = ev.count / rate
    start = ev.start_s
    sel = (t >= start) & (t < start + dur)
    tau = t[sel] - start
    env = np.ones(tau.shape)
    # Onset ramp ends at the first bite so its peak keeps full height; the
    # offset ramp spans half a cycle because jaws settle rather than stop dead.
    ramp_on = min(0.25 / rate, dur / 4.0)
    ramp_off = min(0.5 / rate, dur / 4.0)
    if ramp_on > 0:
        head = tau < ramp_on
        env[head] = 0.5 * (1.0 - np.cos(np.pi * tau[head] / ramp_on))
    if ramp_off > 0:
        tail = tau > dur - ramp_off
        env[tail] = 0.5 * (1.0 - np.cos(np.pi * (dur - tau[tail]) / ramp_off))
    motion[sel] += amp * env * np.sin(2.0 * np.pi * rate * tau)
    return [start + (k + 0.25) / rate for k in range(ev.count)]


def _add_swallow(motion: np.ndarray, t: np.ndarray, ev: ActivityEvent,
                 rng: np.random.Generator) -> float:
    amp = SWALLOW_AMP_RATIO * CHEW_AMP_RATIO * (ev.amplitude if ev.amplitude is not None else 1.0)
    amp *= 1.0 + 0.05 * rng.standard_normal()
    sel = (t >= ev.start_s) & (t < ev.start_s + SWALLOW_DUR_S)
    tau = t[sel] - ev.start_s
    rise = tau < SWALLOW_RISE_S
    bump = np.where(
        rise,
        0.5 * (1.0 - np.cos(np.pi * tau / SWALLOW_RISE_S)),
        0.5 * (1.0 + np.cos(np.pi * (tau - SWALLOW_RISE_S) / SWALLOW_FALL_S)),
    )
    motion[sel] += amp * bump
    return ev.start_s + SWALLOW_RISE_S


def _add_non_eating(motion: np.ndarray, t: np.ndarray, ev: ActivityEvent, fs: float,
                    rng: np.random.Generator) -> tuple[float, float]:
    amp0, dur0, lo, hi = _NON_EATING_SHAPES[ev.label]
    dur = ev.duration_s if ev.duration_s is not None else dur0
    amp = amp0 * (ev.amplitude if ev.amplitude is not None else 1.0)
    amp *= 1.0 + 0.05 * rng.standard_normal()
    sel = (t >= ev.start_s) & (t < ev.start_s + dur)
    n = int(sel.sum())
    if n == 0:
        return ev.start_s, ev.start_s + dur
    white = rng.standard_normal(n)
    sos = signal.butter(2, [lo, min(hi, 0.45 * fs)], btype="bandpass", fs=fs, output="sos")
    colored = signal.sosfilt(sos, white)
    std = float(np.std(colored))
    if std > 1e-12:
        colored = colored / std
    motion[sel] += amp * np.hanning(n) * colored
    return ev.start_s, ev.start_s + dur


def generate(scenario: SynthScenario) -> tuple[CsiTrace, GroundTruth]:
    """Render a scenario into a CSI trace plus exact ground truth."""
    validate_scenario(scenario)
    fs = scenario.sample_rate_hz
    n = int(round(scenario.duration_s * fs))
    if n < 2:
        raise InvalidScenario(f"scenario too short: {n} samples")
    t = np.arange(n) / fs
    rng = np.random.default_rng(scenario.seed)
    motion = np.zeros(n)

    events = sorted(scenario.events, key=lambda e: (e.start_s, e.kind))
    segments: list[tuple[ActivitySegment, str]] = []
    chew_times: list[float] = []
    swallow_times: list[float] = []
    delivery_spans: list[tuple[float, float]] = []
    burst_rates: list[tuple[float, float, float]] = []  # (start, end, rate)

    for ev in events:
        if ev.kind == "delivery":
            lo, hi = _add_delivery(motion, t, ev, rng)
            segments.append((_segment(lo, hi, fs, n), f"delivery:{ev.utensil}"))
            delivery_spans.append((lo, hi))
        elif ev.kind == "chew_burst":
            times = _add_chews(motion, t, ev, rng)
            chew_times.extend(times)
            burst_rates.append((ev.start_s, ev.start_s + ev.count / ev.rate_hz, ev.rate_hz))
        elif ev.kind == "swallow":
            swallow_times.append(_add_swallow(motion, t, ev, rng))
        else:
            lo, hi = _add_non_eating(motion, t, ev, fs, rng)
            segments.append((_segment(lo, hi, fs, n), f"non_eating:{ev.label}"))

    gains = np.asarray(scenario.subcarrier_gains, dtype=np.float64)
    amplitudes = _baselines()[None, :] + motion[:, None] * gains[None, :]
    if scenario.noise_std > 0:
        amplitudes = amplitudes + scenario.noise_std * rng.standard_normal((n, N_SUBCARRIERS))
    if scenario.outlier_rate_hz > 0 and scenario.noise_std > 0:
        count = int(rng.poisson(scenario.outlier_rate_hz * scenario.duration_s))
        if count:
            rows = rng.integers(0, n, count)
            cols = rng.integers(0, N_SUBCARRIERS, count)
            signs = rng.integers(0, 2, count) * 2 - 1
            amplitudes[rows, cols] += 10.0 * scenario.noise_std * signs
    amplitudes = np.clip(amplitudes, 0.0, None)

    trace = CsiTrace(
        sample_rate_hz=fs,
        timestamps=t,
        amplitudes=amplitudes,
        meta={"seed": str(scenario.seed)},
    )
    intervals = _interval_truths(delivery_spans, chew_times, swallow_times, burst_rates)
    truth = GroundTruth(
        segments=segments,
        chew_times_s=sorted(chew_times),
        swallow_times_s=sorted(swallow_times),
        intervals=intervals,
    )
    return trace, truth


def _segment(lo: float, hi: float, fs: float, n: int) -> ActivitySegment:
    start_idx = max(0, min(int(round(lo * fs)), n - 1))
    end_idx = max(start_idx + 1, min(int(round(hi * fs)), n))
    return ActivitySegment(start_idx=start_idx, end_idx=end_idx, start_s=lo, end_s=hi)


def _interval_truths(delivery_spans, chew_times, swallow_times, burst_rates) -> list[IntervalTruth]:
    spans = sorted(delivery_spans)
    out = []
    for (_, end0), (start1, _) in zip(spans, spans[1:]):
        if start1 <= end0:
            continue
        chews = [c for c in chew_times if end0 <= c < start1]
        swallows = [s for s in swallow_times if end0 <= s < start1]
        rates = [r for lo, hi, r in burst_rates if lo >= end0 and hi <= start1]
        rate = float(np.mean(rates)) if rates else None
        out.append(
            IntervalTruth(
                start_s=end0,
                end_s=start1,
                chew_count=len(chews),
                swallow_count=len(swallows),
                chew_rate_hz=rate,
            )
        )
    return out


def ground_truth_to_dict(truth: GroundTruth) -> dict:
    return {
        "segments": [
            {
                "start_idx": seg.start_idx,
                "end_idx": seg.end_idx,
                "start_s": seg.start_s,
                "end_s": seg.end_s,
                "kind": kind,
            }
            for seg, kind in truth.segments
        ],
        "chew_times_s": list(truth.chew_times_s),
        "swallow_times_s": list(truth.swallow_times_s),
        "intervals": [
            {
                "start_s": iv.start_s,
                "end_s": iv.end_s,
                "chew_count": iv.chew_count,
                "swallow_count": iv.swallow_count,
                "chew_rate_hz": iv.chew_rate_hz,
            }
            for iv in truth.intervals
        ],
    }


def ground_truth_from_dict(d: dict) -> GroundTruth:
    segments = [
        (
            ActivitySegment(
                start_idx=s["start_idx"],
                end_idx=s["end_idx"],
                start_s=s["start_s"],
                end_s=s["end_s"],
            ),
            s["kind"],
        )
        for s in d.get("segments", [])
    ]
    intervals = [
        IntervalTruth(
            start_s=iv["start_s"],
            end_s=iv["end_s"],
            chew_count=iv["chew_count"],
            swallow_count=iv["swallow_count"],
            chew_rate_hz=iv.get("chew_rate_hz"),
        )
        for iv in d.get("intervals", [])
    ]
    return GroundTruth(
        segments=segments,
        chew_times_s=list(d.get("chew_times_s", [])),
        swallow_times_s=list(d.get("swallow_times_s", [])),
        intervals=intervals,
    )


def parse_scenario(text: str) -> SynthScenario:
    """Parse the scenario text format.

    Lines are either ``key = value`` scalars (duration_s required;
    sample_rate_hz, seed, noise_std, outlier_rate_hz, subcarrier_gains
    optional) or ``event KIND key=value ...`` entries. ``#`` starts a
    comment.
    """
    scalars: dict[str, str] = {}
    events: list[ActivityEvent] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("event"):
            tokens = line.split()
            if len(tokens) < 2:
                raise InvalidScenario(f"line {lineno}: event needs a kind")
            kind = tokens[1]
            kv: dict[str, str] = {}
            for tok in tokens[2:]:
                if "=" not in tok:
                    raise InvalidScenario(f"line {lineno}: expected key=value, got {tok!r}")
                key, val = tok.split("=", 1)
                kv[key] = val
            events.append(_event_from_kv(kind, kv, lineno))
        elif "=" in line:
            key, val = (part.strip() for part in line.split("=", 1))
            scalars[key] = val
        else:
            raise InvalidScenario(f"line {lineno}: unparseable line {raw!r}")

    if "duration_s" not in scalars:
        raise InvalidScenario("scenario must set duration_s")

    def num(key: str, default: float) -> float:
        if key not in scalars:
            return default
        try:
            return float(scalars[key])
        except ValueError:
            raise InvalidScenario(f"{key} must be numeric, got {scalars[key]!r}") from None

    gains = default_subcarrier_gains()
    if "subcarrier_gains" in scalars:
        try:
            gains = tuple(float(v) for v in scalars["subcarrier_gains"].split(","))
        except ValueError:
            raise InvalidScenario("subcarrier_gains must be a comma-separated float list") from None

    scenario = SynthScenario(
        duration_s=num("duration_s", 0.0),
        sample_rate_hz=num("sample_rate_hz", 500.0),
        seed=int(num("seed", 0.0)),
        noise_std=num("noise_std", 0.05),
        outlier_rate_hz=num("outlier_rate_hz", 0.0),
        subcarrier_gains=gains,
        events=tuple(events),
    )
    validate_scenario(scenario)
    return scenario


def _event_from_kv(kind: str, kv: dict[str, str], lineno: int) -> ActivityEvent:
    def fnum(key: str) -> float | None:
        if key not in kv:
            return None
        try:
            return float(kv[key])
        except ValueError:
            raise InvalidScenario(f"line {lineno}: {key} must be numeric, got {kv[key]!r}") from None

    start = fnum("start")
    if start is None:
        raise InvalidScenario(f"line {lineno}: event needs start=<seconds>")
    count = fnum("count")
    return ActivityEvent(
        kind=kind,
        start_s=start,
        utensil=kv.get("utensil"),
        rate_hz=fnum("rate_hz"),
        count=int(count) if count is not None else None,
        label=kv.get("label"),
        duration_s=fnum("duration_s"),
        amplitude=fnum("amplitude"),
    )


def scenario_to_text(scenario: SynthScenario) -> str:
    lines = [
        f"duration_s = {scenario.duration_s!r}",
        f"sample_rate_hz = {scenario.sample_rate_hz!r}",
        f"seed = {scenario.seed}",
        f"noise_std = {scenario.noise_std!r}",
        f"outlier_rate_hz = {scenario.outlier_rate_hz!r}",
        "subcarrier_gains = " + ",".join(repr(g) for g in scenario.subcarrier_gains),
    ]
    for ev in scenario.events:
        parts = [f"event {ev.kind} start={ev.start_s!r}"]
        if ev.utensil is not None:
            parts.append(f"utensil={ev.utensil}")
        if ev.rate_hz is not None:
            parts.append(f"rate_hz={ev.rate_hz!r}")
        if ev.count is not None:
            parts.append(f"count={ev.count}")
        if ev.label is not None:
            parts.append(f"label={ev.label}")
        if ev.duration_s is not None:
            parts.append(f"duration_s={ev.duration_s!r}")
        if ev.amplitude is not None:
            parts.append(f"amplitude={ev.amplitude!r}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
