"""Fixed 14-dimensional feature vector for a single amplitude series.

Nine time-domain statistics followed by five frequency-domain values.
The frequency half operates on the mean-removed series so that a static
amplitude offset does not mask motion content; spectra use an FFT
zero-padded to the next power of two, and bin powers are scaled so the
one-sided spectrum sums to the mean-removed signal energy.
"""

from __future__ import annotations

import numpy as np

from .errors import SegmentTooShort

FEATURE_NAMES = (
    "mean",
    "std",
    "rms",
    "arv",
    "p25",
    "p75",
    "iqr",
    "skewness",
    "kurtosis",
    "spectral_energy",
    "spectral_entropy",
    "dominant_freq_hz",
    "dominant_power",
    "dominant_phase",
)

N_FEATURES = len(FEATURE_NAMES)

MIN_SEGMENT_SAMPLES = 4


def next_pow2(n: int) -> int:
    if n < 1:
        return 1
    return 1 << (n - 1).bit_length()


def onesided_power(x: np.ndarray, n_fft: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (rfft coefficients, per-bin power) for a real series.

    Power bins carry the doubling of the mirrored negative frequencies,
    so power.sum() equals sum(x**2) regardless of zero padding.
    """
    coef = np.fft.rfft(x, n_fft)
    scale = np.full(coef.shape[0], 2.0)
    scale[0] = 1.0
    if n_fft % 2 == 0:
        scale[-1] = 1.0
    power = (coef.real**2 + coef.imag**2) * scale / n_fft
    return coef, power


def series_features(series: np.ndarray, fs: float) -> np.ndarray:
    """Compute the 14 features of one series sampled at fs Hz.

    Raises SegmentTooShort for fewer than MIN_SEGMENT_SAMPLES samples.
    Moment features use population normalisation; skewness and kurtosis
    (excess) are defined as 0 for a constant series.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < MIN_SEGMENT_SAMPLES:
        raise SegmentTooShort(
            f"need at least {MIN_SEGMENT_SAMPLES} samples, got {x.shape}"
        )

    mean = float(np.mean(x))
    dev = x - mean
    m2 = float(np.mean(dev**2))
    std = float(np.sqrt(m2))
    rms = float(np.sqrt(np.mean(x**2)))
    arv = float(np.mean(np.abs(dev)))
    p25, p75 = (float(v) for v in np.percentile(x, [25.0, 75.0]))
    iqr = p75 - p25
    if std > 1e-12 * max(1.0, abs(mean)):
        skew = float(np.mean(dev**3)) / std**3
        kurt = float(np.mean(dev**4)) / m2**2 - 3.0
    else:
        skew = 0.0
        kurt = 0.0

    n_fft = next_pow2(x.shape[0])
    coef, power = onesided_power(dev, n_fft)
    energy = float(power.sum())
    if energy > 0.0:
        p = power / energy
        nz = p > 0.0
        entropy = float(-np.sum(p[nz] * np.log(p[nz])))
        k = int(np.argmax(power))
        dom_freq = k * fs / n_fft
        dom_power = float(power[k])
        dom_phase = float(np.angle(coef[k]))
    else:
        entropy = 0.0
        dom_freq = 0.0
        dom_power = 0.0
        dom_phase = 0.0

    return np.array(
        [
            mean,
            std,
            rms,
            arv,
            p25,
            p75,
            iqr,
            skew,
            kurt,
            energy,
            entropy,
            dom_freq,
            dom_power,
            dom_phase,
        ],
        dtype=np.float64,
    )
