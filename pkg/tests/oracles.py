"""Independent reference implementations used by the tests.

Everything here is written the slow, obvious way (explicit loops, O(n*w)
sliding statistics, O(n^2) DFT matrices) so the fast implementations in
the package can be checked against a second opinion rather than against
themselves.
"""

from __future__ import annotations

import numpy as np


def dft_onesided(x: np.ndarray, n_fft: int) -> tuple[np.ndarray, np.ndarray]:
    """One-sided DFT coefficients and power via an explicit DFT matrix.

    Power bins are doubled for mirrored negative frequencies (except DC
    and, for even n_fft, Nyquist) and divided by n_fft, so the power sums
    to sum(x**2) when n_fft >= len(x).
    """
    x = np.asarray(x, dtype=np.float64)
    padded = np.zeros(n_fft)
    padded[: x.shape[0]] = x
    n_bins = n_fft // 2 + 1
    k = np.arange(n_bins)[:, None]
    n = np.arange(n_fft)[None, :]
    basis = np.exp(-2j * np.pi * k * n / n_fft)
    coef = basis @ padded
    scale = np.full(n_bins, 2.0)
    scale[0] = 1.0
    if n_fft % 2 == 0:
        scale[-1] = 1.0
    power = (coef.real**2 + coef.imag**2) * scale / n_fft
    return coef, power


def moving_average(x: np.ndarray, window: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    half_lo = (window - 1) // 2
    half_hi = window // 2
    out = np.empty_like(x)
    for i in range(x.shape[0]):
        a = max(0, i - half_lo)
        b = min(x.shape[0], i + half_hi + 1)
        out[i] = np.mean(x[a:b])
    return out


def moving_variance(x: np.ndarray, window: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    half_lo = (window - 1) // 2
    half_hi = window // 2
    out = np.empty_like(x)
    for i in range(x.shape[0]):
        a = max(0, i - half_lo)
        b = min(x.shape[0], i + half_hi + 1)
        seg = x[a:b]
        if seg.shape[0] < 2:
            out[i] = 0.0
        else:
            m = np.mean(seg)
            out[i] = np.sum((seg - m) ** 2) / (seg.shape[0] - 1)
    return out


def hampel(x: np.ndarray, window: int, k: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    half = window // 2
    out = x.copy()
    for i in range(x.shape[0]):
        a = max(0, i - half)
        b = min(x.shape[0], i + half + 1)
        seg = x[a:b]
        med = np.median(seg)
        sigma = 1.4826 * np.median(np.abs(seg - med))
        if np.abs(x[i] - med) > k * sigma:
            out[i] = med
    return out


def hann(n: int) -> np.ndarray:
    if n == 1:
        return np.ones(1)
    i = np.arange(n)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * i / (n - 1))


def spectrogram_power(x: np.ndarray, fs: float, window_s: float,
                      hop_s: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Frame-by-frame Hann power spectrogram via the DFT matrix."""
    x = np.asarray(x, dtype=np.float64)
    win = int(round(window_s * fs))
    hop = int(round(hop_s * fs))
    w = hann(win)
    rows = []
    times = []
    t = 0
    while t + win <= x.shape[0]:
        _, power = dft_onesided(x[t : t + win] * w, win)
        rows.append(power)
        times.append((t + win / 2.0) / fs)
        t += hop
    freqs = np.arange(win // 2 + 1) * fs / win
    return np.array(rows), freqs, np.array(times)


def short_time_energy(cpsd: np.ndarray, window_bins: int) -> np.ndarray:
    """Zero-padded correlation of squared curve with squared Hann."""
    c = np.asarray(cpsd, dtype=np.float64)
    w = hann(window_bins) ** 2
    half = window_bins // 2
    out = np.zeros(c.shape[0])
    for i in range(c.shape[0]):
        acc = 0.0
        for j in range(window_bins):
            t = i + j - half
            if 0 <= t < c.shape[0]:
                acc += c[t] ** 2 * w[j]
        out[i] = acc
    return out


def quantile_linear(xs: np.ndarray, q: float) -> float:
    """Linear-interpolation quantile on the sorted values, q in [0, 100]."""
    s = np.sort(np.asarray(xs, dtype=np.float64))
    pos = q / 100.0 * (s.shape[0] - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, s.shape[0] - 1)
    frac = pos - lo
    return float(s[lo] + frac * (s[hi] - s[lo]))


def series_features(x: np.ndarray, fs: float) -> np.ndarray:
    """The 14 features written out longhand against dft_onesided."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    mean = float(np.sum(x)) / n
    dev = x - mean
    m2 = float(np.sum(dev**2)) / n
    std = float(np.sqrt(m2))
    rms = float(np.sqrt(np.sum(x**2) / n))
    arv = float(np.sum(np.abs(dev))) / n
    p25 = quantile_linear(x, 25.0)
    p75 = quantile_linear(x, 75.0)
    if std > 1e-12 * max(1.0, abs(mean)):
        skew = float(np.sum(dev**3) / n) / std**3
        kurt = float(np.sum(dev**4) / n) / m2**2 - 3.0
    else:
        skew = 0.0
        kurt = 0.0
    n_fft = 1
    while n_fft < n:
        n_fft *= 2
    coef, power = dft_onesided(dev, n_fft)
    energy = float(np.sum(power))
    if energy > 0.0:
        p = power / energy
        entropy = float(-np.sum(p[p > 0.0] * np.log(p[p > 0.0])))
        k = int(np.argmax(power))
        dom_freq = k * fs / n_fft
        dom_power = float(power[k])
        dom_phase = float(np.arctan2(coef[k].imag, coef[k].real))
    else:
        entropy, dom_freq, dom_power, dom_phase = 0.0, 0.0, 0.0, 0.0
    return np.array([mean, std, rms, arv, p25, p75, p75 - p25, skew, kurt,
                     energy, entropy, dom_freq, dom_power, dom_phase])


def apsd_db(block: np.ndarray, fs: float, floor_db: float) -> tuple[np.ndarray, np.ndarray]:
    """Accumulated PSD over subcarriers via the DFT matrix, in dB."""
    block = np.asarray(block, dtype=np.float64)
    n = block.shape[0]
    n_fft = 1
    while n_fft < n:
        n_fft *= 2
    n_bins = n_fft // 2 + 1
    accum = np.zeros(n_bins)
    for col in range(block.shape[1]):
        series = block[:, col]
        series = series - np.sum(series) / n
        padded = np.zeros(n_fft)
        padded[:n] = series
        k = np.arange(n_bins)[:, None]
        t = np.arange(n_fft)[None, :]
        coef = np.exp(-2j * np.pi * k * t / n_fft) @ padded
        accum += (coef.real**2 + coef.imag**2) / n
    floor_power = 10.0 ** (floor_db / 10.0)
    db = 10.0 * np.log10(np.maximum(accum, floor_power))
    freqs = np.arange(n_bins) * fs / n_fft
    return freqs, db


def fuse_probs(probs: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted probability fusion as an explicit double loop."""
    probs = np.asarray(probs, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    fused = np.zeros(probs.shape[1])
    for i in range(probs.shape[0]):
        for c in range(probs.shape[1]):
            fused[c] += weights[i] * probs[i, c]
    return fused


def butterworth_bandpass_mag(f_hz: float, low_hz: float, high_hz: float,
                             order: int) -> float:
    """Analog Butterworth band-pass magnitude at f_hz (single pass)."""
    if f_hz == 0.0:
        return 0.0
    f0_sq = low_hz * high_hz
    bw = high_hz - low_hz
    omega = (f_hz**2 - f0_sq) / (bw * f_hz)
    return 1.0 / np.sqrt(1.0 + omega ** (2 * order))
