"""Chew and swallow analysis of inter-delivery intervals.

Works on band-passed (0.8-3 Hz) amplitudes. A single minute-motion
series is stitched from the most consistent subcarrier per 250 ms
window; the accumulated power spectral density over all subcarriers
yields the chewing rate; peak-valley patterns on the stitched series are
split into chews and swallows by comparing each pattern's depth and
peak-to-valley time against the interval means (swallows are the
smaller, slower patterns).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntervalTooShort
from .features import next_pow2
from .preprocess import moving_average
from .segmentation import ActivitySegment
from .trace_io import CsiTrace

APSD_FLOOR_DB = -300.0


@dataclass(frozen=True)
class ReconstructedSeries:
    """Minute-motion series stitched from per-window subcarriers.

    source_subcarrier holds the 1-based subcarrier number each sample
    was taken from.
    """

    values: np.ndarray
    start_idx: int
    sample_rate_hz: float
    source_subcarrier: np.ndarray
    interval: ActivitySegment


@dataclass(frozen=True)
class ApsdSpectrum:
    freqs_hz: np.ndarray
    db: np.ndarray


@dataclass(frozen=True)
class ChewSwallowReport:
    interval: ActivitySegment
    chew_count: int
    swallow_count: int
    chew_times_s: list[float]
    swallow_times_s: list[float]
    chew_rate_hz: float | None


def reconstruct(trace: CsiTrace, interval: ActivitySegment, *,
                window_s: float = 0.25, keep: int = 10,
                detrend_s: float | None = 2.0) -> ReconstructedSeries:
    """Stitch one series from the steadiest subcarriers.

    Per window: keep the `keep` subcarriers whose window means are
    closest to the grand mean of all 30 window means, then take the one
    with the largest peak-to-peak excursion (ties prefer the lower
    subcarrier index). Each appended window is offset so that it
    continues from the value its own subcarrier had at the previous
    sample, which keeps boundaries continuous and reduces to an identity
    when every window picks the same subcarrier.

    The continuity offsets random-walk over long intervals, which would
    push the series baseline away from zero; when detrend_s is set, the
    moving average over that window is subtracted so peak heights stay
    comparable to a fixed threshold across the whole interval. Pass
    detrend_s=None to keep the raw stitched values.
    """
    fs = trace.sample_rate_hz
    win = int(round(window_s * fs))
    a, b = interval.start_idx, interval.end_idx
    n = b - a
    if win < 2 or n < win:
        raise IntervalTooShort(f"interval has {n} samples, need at least {win}")
    block = trace.amplitudes[a:b]

    values = np.empty(n)
    source = np.empty(n, dtype=np.int64)
    offset = 0.0
    prev_written = False
    for s in range(0, n, win):
        e = min(s + win, n)
        window = block[s:e]
        means = window.mean(axis=0)
        grand = float(means.mean())
        closeness = np.abs(means - grand)
        candidates = np.argsort(closeness, kind="stable")[:keep]
        ptp = window[:, candidates].max(axis=0) - window[:, candidates].min(axis=0)
        best = int(candidates[ptp == ptp.max()].min())
        col = block[:, best]
        if prev_written:
            offset = values[s - 1] - col[s - 1]
        else:
            offset = 0.0
            prev_written = True
        values[s:e] = col[s:e] + offset
        source[s:e] = best + 1
    if detrend_s is not None:
        trend_win = max(1, int(round(detrend_s * fs))) | 1
        values = values - moving_average(values, min(trend_win, n))
    return ReconstructedSeries(
        values=values,
        start_idx=a,
        sample_rate_hz=fs,
        source_subcarrier=source,
        interval=interval,
    )


def apsd(trace: CsiTrace, interval: ActivitySegment, *,
         floor_db: float = APSD_FLOOR_DB) -> ApsdSpectrum:
    """Accumulated PSD: 10*log10 of the per-frequency power summed over
    all 30 mean-removed subcarrier series (FFT zero-padded to the next
    power of two, power normalised by the interval sample count)."""
    a, b = interval.start_idx, interval.end_idx
    n = b - a
    fs = trace.sample_rate_hz
    if n < int(round(2.0 * fs)):
        raise IntervalTooShort(f"interval has {n} samples, need at least 2 s ({int(2 * fs)})")
    block = trace.amplitudes[a:b]
    centered = block - block.mean(axis=0, keepdims=True)
    n_fft = next_pow2(n)
    coef = np.fft.rfft(centered, n_fft, axis=0)
    accum = ((coef.real**2 + coef.imag**2) / n).sum(axis=1)
    floor_power = 10.0 ** (floor_db / 10.0)
    db = 10.0 * np.log10(np.maximum(accum, floor_power))
    freqs = np.fft.rfftfreq(n_fft, 1.0 / fs)
    return ApsdSpectrum(freqs_hz=freqs, db=db)


def estimate_chew_rate(spectrum: ApsdSpectrum, *, band_low_hz: float = 0.8,
                       band_high_hz: float = 3.0,
                       min_prominence_db: float = 3.0) -> float | None:
    """Frequency of the strongest in-band APSD bin, or None when that
    bin does not rise min_prominence_db above the in-band median."""
    sel = (spectrum.freqs_hz >= band_low_hz) & (spectrum.freqs_hz <= band_high_hz)
    if not np.any(sel):
        return None
    db = spectrum.db[sel]
    freqs = spectrum.freqs_hz[sel]
    k = int(np.argmax(db))
    if db[k] < float(np.median(db)) + min_prominence_db:
        return None
    return float(freqs[k])


def _strict_peaks(x: np.ndarray) -> list[int]:
    """Indices of strict local maxima; plateaus report their left edge."""
    d = np.diff(x)
    nz = np.flatnonzero(d != 0)
    peaks: list[int] = []
    for j in range(len(nz) - 1):
        i0, i1 = nz[j], nz[j + 1]
        if d[i0] > 0 and d[i1] < 0:
            peaks.append(int(i0) + 1)
    return peaks


def detect_peaks(series: ReconstructedSeries, beta_s: float,
                 gamma: float) -> list[tuple[int, int]]:
    """Peak-valley pattern extraction.

    Candidate peaks below gamma are dropped; survivors are thinned
    greedily by descending amplitude (earlier peak wins ties) so that no
    two kept peaks lie closer than beta_s. Every kept peak pairs with
    the lowest sample before the next kept peak (or the series end).
    Returns (peak_idx, valley_idx) pairs in time order.
    """
    x = series.values
    beta_n = max(1, int(round(beta_s * series.sample_rate_hz)))
    candidates = [p for p in _strict_peaks(x) if x[p] >= gamma]
    order = sorted(candidates, key=lambda p: (-x[p], p))
    kept: list[int] = []
    for p in order:
        if all(abs(p - q) >= beta_n for q in kept):
            kept.append(p)
    kept.sort()

    pairs: list[tuple[int, int]] = []
    for i, p in enumerate(kept):
        limit = kept[i + 1] if i + 1 < len(kept) else x.shape[0]
        span = x[p + 1 : limit]
        if span.shape[0] == 0:
            continue
        v = p + 1 + int(np.argmin(span))
        pairs.append((p, v))
    return pairs


SWALLOW_DEPTH_RATIO = 0.66
SWALLOW_SPAN_RATIO = 1.2
SWALLOW_REFRACTORY_S = 2.0


def count_chews_swallows(series: ReconstructedSeries, peaks: list[tuple[int, int]], *,
                         chew_rate_hz: float | None = None,
                         time_origin_s: float = 0.0,
                         depth_ratio: float = SWALLOW_DEPTH_RATIO,
                         span_ratio: float = SWALLOW_SPAN_RATIO,
                         refractory_s: float = SWALLOW_REFRACTORY_S) -> ChewSwallowReport:
    """Split peak-valley patterns into chews and swallows.

    A pattern is a swallow when its depth falls below depth_ratio times
    the interval median depth and its peak-to-valley time exceeds
    span_ratio times the interval median. Chews outnumber swallows in
    any interval, so the medians track the chew population and are not
    dragged by the last chew of a burst, whose valley sits far away in
    the quiet gap. A swallow-shaped pattern closer than refractory_s to
    the previous swallow is the filter rebound of that swallow, not a
    new one, and is discarded. With no peaks the report carries zero
    counts.
    """
    if not peaks:
        return ChewSwallowReport(
            interval=series.interval,
            chew_count=0,
            swallow_count=0,
            chew_times_s=[],
            swallow_times_s=[],
            chew_rate_hz=chew_rate_hz,
        )
    x = series.values
    fs = series.sample_rate_hz
    depths = np.array([x[p] - x[v] for p, v in peaks])
    spans = np.array([(v - p) / fs for p, v in peaks])
    med_depth = float(np.median(depths))
    med_span = float(np.median(spans))
    chew_times: list[float] = []
    swallow_times: list[float] = []
    for (p, _), depth, span in zip(peaks, depths, spans):
        t = time_origin_s + (series.start_idx + p) / fs
        if depth < depth_ratio * med_depth and span > span_ratio * med_span:
            if swallow_times and t - swallow_times[-1] < refractory_s:
                continue
            swallow_times.append(t)
        else:
            chew_times.append(t)
    return ChewSwallowReport(
        interval=series.interval,
        chew_count=len(chew_times),
        swallow_count=len(swallow_times),
        chew_times_s=chew_times,
        swallow_times_s=swallow_times,
        chew_rate_hz=chew_rate_hz,
    )


def default_gamma(series: ReconstructedSeries, scale: float = 1.1) -> float:
    """Median absolute deviation based minimum peak height."""
    x = series.values
    med = float(np.median(x))
    return scale * float(np.median(np.abs(x - med)))


def default_beta_s(chew_rate_hz: float | None, scale: float = 0.7,
                   fallback_s: float = 0.5) -> float:
    """Minimum peak separation: scale/rate, or fallback_s without a rate."""
    if chew_rate_hz is None or chew_rate_hz <= 0:
        return fallback_s
    return scale / chew_rate_hz
