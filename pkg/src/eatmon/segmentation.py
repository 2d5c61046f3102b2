"""Activity segmentation from short-time energy of the cumulative PSD.

The detector stacks three steps: a Hann short-time Fourier power
spectrogram, accumulation over frequency into a per-frame power curve
(CPSD), and a squared Hann-weighted smoothing of that curve (short-time
energy). Frames whose energy exceeds an adaptive threshold form activity
segments; boundaries grow outward to the nearest sub-threshold frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import SeriesTooShort, WindowTooLarge, WindowTooSmall


@dataclass(frozen=True)
class ActivitySegment:
    """Half-open [start, end) span in both sample and second coordinates."""

    start_idx: int
    end_idx: int
    start_s: float
    end_s: float

    def __post_init__(self):
        if self.end_idx <= self.start_idx or self.end_s <= self.start_s:
            raise ValueError(f"empty or inverted segment {self}")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


class Spectrogram(NamedTuple):
    power: np.ndarray  # (T, F)
    freqs_hz: np.ndarray  # (F,)
    times_s: np.ndarray  # (T,) window-center times


def spectrogram(series: np.ndarray, fs: float, window_s: float = 1.0,
                hop_s: float = 0.25) -> Spectrogram:
    """Hann-windowed power spectrogram.

    Frame t covers samples [t*hop, t*hop + win); T = (N - win)//hop + 1.
    Bin powers are scaled so that power[t].sum() equals the energy of the
    Hann-windowed frame (one-sided doubling applied).
    """
    x = np.asarray(series, dtype=np.float64)
    win = int(round(window_s * fs))
    hop = int(round(hop_s * fs))
    if win < 2 or hop < 1:
        raise WindowTooSmall(f"window {window_s}s / hop {hop_s}s too small at fs={fs}")
    if x.shape[0] < win:
        raise SeriesTooShort(f"series length {x.shape[0]} shorter than window {win}")
    frames = np.lib.stride_tricks.sliding_window_view(x, win)[::hop]
    w = np.hanning(win)
    coef = np.fft.rfft(frames * w, axis=1)
    scale = np.full(coef.shape[1], 2.0)
    scale[0] = 1.0
    if win % 2 == 0:
        scale[-1] = 1.0
    power = (coef.real**2 + coef.imag**2) * scale / win
    freqs = np.fft.rfftfreq(win, 1.0 / fs)
    times = (np.arange(frames.shape[0]) * hop + win / 2.0) / fs
    return Spectrogram(power=power, freqs_hz=freqs, times_s=times)


def cumulative_psd(power: np.ndarray) -> np.ndarray:
    """Accumulate spectrogram power over the frequency axis."""
    arr = np.asarray(power, dtype=np.float64)
    if arr.ndim != 2:
        raise WindowTooSmall(f"expected a (T, F) power matrix, got shape {arr.shape}")
    return arr.sum(axis=1)


def ste_window(window_bins: int) -> np.ndarray:
    """Centered Hann weights used by short_time_energy."""
    if window_bins < 3 or window_bins % 2 == 0:
        raise WindowTooSmall(f"window must be odd and >= 3, got {window_bins}")
    return np.hanning(window_bins)


def short_time_energy(cpsd: np.ndarray, window_bins: int = 9) -> np.ndarray:
    """Sum of squared Hann-weighted CPSD values around each frame.

    ste[n] = sum_i (cpsd[i] * W[n - i])**2 with W the centered Hann
    window; values outside the curve are treated as zero.
    """
    c = np.asarray(cpsd, dtype=np.float64)
    w = ste_window(window_bins)
    if window_bins > c.shape[0]:
        raise WindowTooLarge(f"window {window_bins} exceeds curve length {c.shape[0]}")
    return np.convolve(c**2, w**2, mode="same")


def segment_activities(ste: np.ndarray, *, fs: float, eps_rel: float = 0.01,
                       min_gap_s: float = 0.5, min_len_s: float = 0.8,
                       hop_s: float = 0.25, time_offset_s: float = 0.0,
                       noise_guard: float = 4.0,
                       n_samples: int | None = None) -> list[ActivitySegment]:
    """Threshold the energy curve into activity segments.

    The threshold is eps_rel * max(ste), floored at noise_guard times the
    median so that a curve containing nothing but noise produces no
    segments. Runs above threshold are merged across gaps shorter than
    min_gap_s, runs shorter than min_len_s are dropped, and each survivor
    grows outward to the flanking sub-threshold frames. Reported times
    sit halfway between a flanking frame and its hot neighbour, the
    unbiased estimate of where the curve crossed theta. Frame k is
    anchored at k * hop_s + time_offset_s; pass the spectrogram
    half-window as time_offset_s so frames carry window-center times.
    """
    e = np.asarray(ste, dtype=np.float64)
    if e.size == 0 or not np.any(e > 0):
        return []
    theta = max(eps_rel * float(e.max()), noise_guard * float(np.median(e)))
    above = e > theta
    if not np.any(above):
        return []

    starts = np.flatnonzero(above & np.r_[True, ~above[:-1]])
    ends = np.flatnonzero(above & np.r_[~above[1:], True])
    runs = list(zip(starts.tolist(), ends.tolist()))

    min_gap_bins = min_gap_s / hop_s
    merged: list[list[int]] = []
    for a, b in runs:
        if merged and (a - merged[-1][1] - 1) < min_gap_bins:
            merged[-1][1] = b
        else:
            merged.append([a, b])

    min_len_bins = min_len_s / hop_s
    kept = [(a, b) for a, b in merged if (b - a + 1) >= min_len_bins]

    # quad = (left zero point, right zero point, first hot bin, last hot bin)
    extended = [[max(a - 1, 0), min(b + 1, e.shape[0] - 1), a, b] for a, b in kept]
    joined: list[list[int]] = []
    for q in extended:
        if joined and q[0] <= joined[-1][1] + 1:
            joined[-1][1] = max(joined[-1][1], q[1])
            joined[-1][3] = max(joined[-1][3], q[3])
        else:
            joined.append(q)

    out: list[ActivitySegment] = []
    for a_ext, b_ext, a, b in joined:
        start_s = 0.5 * (a_ext + a) * hop_s + time_offset_s
        end_s = 0.5 * (b_ext + b) * hop_s + time_offset_s
        start_idx = int(round(start_s * fs))
        end_idx = int(round(end_s * fs))
        if n_samples is not None:
            start_idx = max(0, min(start_idx, n_samples - 1))
            end_idx = max(start_idx + 1, min(end_idx, n_samples))
        out.append(
            ActivitySegment(
                start_idx=start_idx,
                end_idx=end_idx,
                start_s=start_s,
                end_s=end_s,
            )
        )
    return out
