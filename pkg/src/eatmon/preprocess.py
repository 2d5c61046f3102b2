"""Amplitude stream conditioning: outlier removal, filtering, smoothing.

All functions operate on one 1-D series; apply_per_subcarrier maps them
across the columns of an amplitude matrix. The band-pass is a Butterworth
design realised as second-order sections; zero-phase mode runs it forward
and backward, which doubles the effective order and preserves symmetric
pulse peak positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import InvalidBand, SeriesTooShort, WindowTooLarge, WindowTooSmall


@dataclass(frozen=True)
class FilterSpec:
    """Band-pass settings plus an optional band-stop (notch) range."""

    low_hz: float = 0.8
    high_hz: float = 3.0
    order: int = 4
    zero_phase: bool = True
    notch_low_hz: float | None = None
    notch_high_hz: float | None = None


def remove_outliers(series: np.ndarray, window: int = 11, k: float = 3.0) -> np.ndarray:
    """Hampel filter: replace samples deviating from their centered
    window median by more than k * 1.4826 * MAD with that median.

    Window must be odd, >= 3 and <= series length. Edge windows are
    truncated to the available samples.
    """
    x = np.asarray(series, dtype=np.float64)
    n = x.shape[0]
    if window < 3 or window % 2 == 0:
        raise WindowTooSmall(f"window must be odd and >= 3, got {window}")
    if window > n:
        raise WindowTooLarge(f"window {window} exceeds series length {n}")
    half = window // 2
    out = x.copy()

    view = np.lib.stride_tricks.sliding_window_view(x, window)
    med = np.median(view, axis=1)
    mad = np.median(np.abs(view - med[:, None]), axis=1)
    center = x[half : n - half]
    mask = np.abs(center - med) > k * 1.4826 * mad
    out[half : n - half] = np.where(mask, med, center)

    for i in list(range(half)) + list(range(n - half, n)):
        win = x[max(0, i - half) : min(n, i + half + 1)]
        m = np.median(win)
        d = np.median(np.abs(win - m))
        if abs(x[i] - m) > k * 1.4826 * d:
            out[i] = m
    return out


def _design_bandpass(fs: float, low_hz: float, high_hz: float, order: int) -> np.ndarray:
    if not (0.0 < low_hz < high_hz < fs / 2.0):
        raise InvalidBand(
            f"band [{low_hz}, {high_hz}] Hz invalid for sample rate {fs} Hz"
        )
    if order < 1:
        raise InvalidBand(f"order must be >= 1, got {order}")
    return signal.butter(order, [low_hz, high_hz], btype="bandpass", fs=fs, output="sos")


def _apply_sos(sos: np.ndarray, x: np.ndarray, zero_phase: bool) -> np.ndarray:
    if zero_phase:
        padlen = 3 * (2 * sos.shape[0] + 1)
        if x.shape[0] <= padlen:
            raise SeriesTooShort(
                f"zero-phase filtering needs more than {padlen} samples, got {x.shape[0]}"
            )
        return signal.sosfiltfilt(sos, x)
    return signal.sosfilt(sos, x)


def bandpass(series: np.ndarray, fs: float, spec: FilterSpec = FilterSpec()) -> np.ndarray:
    """Butterworth band-pass (optionally preceded by a notch). Length
    preserving; zero-phase when spec.zero_phase."""
    x = np.asarray(series, dtype=np.float64)
    if (spec.notch_low_hz is None) != (spec.notch_high_hz is None):
        raise InvalidBand("notch band needs both low and high edges")
    if spec.notch_low_hz is not None:
        x = band_stop(x, fs, spec.notch_low_hz, spec.notch_high_hz, order=spec.order,
                      zero_phase=spec.zero_phase)
    sos = _design_bandpass(fs, spec.low_hz, spec.high_hz, spec.order)
    return _apply_sos(sos, x, spec.zero_phase)


def band_stop(series: np.ndarray, fs: float, low_hz: float, high_hz: float,
              order: int = 4, zero_phase: bool = True) -> np.ndarray:
    """Butterworth band-stop used for the optional interference notch."""
    if not (0.0 < low_hz < high_hz < fs / 2.0):
        raise InvalidBand(
            f"notch [{low_hz}, {high_hz}] Hz invalid for sample rate {fs} Hz"
        )
    sos = signal.butter(order, [low_hz, high_hz], btype="bandstop", fs=fs, output="sos")
    return _apply_sos(sos, np.asarray(series, dtype=np.float64), zero_phase)


def _window_edges(n: int, window: int) -> tuple[np.ndarray, np.ndarray]:
    left = (window - 1) // 2
    right = window // 2
    idx = np.arange(n)
    lo = np.clip(idx - left, 0, n)
    hi = np.clip(idx + right + 1, 0, n)
    return lo, hi


def moving_average(series: np.ndarray, window: int) -> np.ndarray:
    """Centered moving mean with edge-truncated windows."""
    x = np.asarray(series, dtype=np.float64)
    if window < 1:
        raise WindowTooSmall(f"window must be >= 1, got {window}")
    if window > x.shape[0]:
        raise WindowTooLarge(f"window {window} exceeds series length {x.shape[0]}")
    lo, hi = _window_edges(x.shape[0], window)
    csum = np.concatenate(([0.0], np.cumsum(x)))
    return (csum[hi] - csum[lo]) / (hi - lo)


def moving_variance(series: np.ndarray, window: int) -> np.ndarray:
    """Centered unbiased variance per window, edge-truncated.

    Truncated edge windows that degenerate to a single sample yield 0.
    The series mean is subtracted before the cumulative sums to keep the
    computation well conditioned for large static offsets.
    """
    x = np.asarray(series, dtype=np.float64)
    n = x.shape[0]
    if window < 2:
        raise WindowTooSmall(f"window must be >= 2, got {window}")
    if window > n:
        raise WindowTooLarge(f"window {window} exceeds series length {n}")
    y = x - np.mean(x)
    lo, hi = _window_edges(n, window)
    m = (hi - lo).astype(np.float64)
    c1 = np.concatenate(([0.0], np.cumsum(y)))
    c2 = np.concatenate(([0.0], np.cumsum(y * y)))
    s1 = c1[hi] - c1[lo]
    s2 = c2[hi] - c2[lo]
    ss = np.maximum(s2 - s1 * s1 / m, 0.0)
    denom = np.maximum(m - 1.0, 1.0)
    out = ss / denom
    out[m < 2] = 0.0
    return out


def apply_per_subcarrier(matrix: np.ndarray, fn) -> np.ndarray:
    """Apply a 1-D series transform to every column of a matrix."""
    arr = np.asarray(matrix, dtype=np.float64)
    return np.column_stack([fn(arr[:, i]) for i in range(arr.shape[1])])
