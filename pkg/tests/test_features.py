"""Feature vector against hand-computed values and the DFT-matrix oracle."""

import numpy as np
import pytest

import oracles
from eatmon import features
from eatmon.errors import SegmentTooShort


def test_names_and_count():
    assert len(features.FEATURE_NAMES) == features.N_FEATURES == 14
    assert features.FEATURE_NAMES[0] == "mean"
    assert features.FEATURE_NAMES[-1] == "dominant_phase"


def test_next_pow2():
    assert features.next_pow2(0) == 1
    assert features.next_pow2(1) == 1
    assert features.next_pow2(2) == 2
    assert features.next_pow2(5) == 8
    assert features.next_pow2(1024) == 1024
    assert features.next_pow2(1025) == 2048


def test_known_ramp_values():
    # x = [1, 2, 3, 4] at fs = 8:
    #   mean 2.5, dev [-1.5, -0.5, 0.5, 1.5], m2 = 1.25
    #   rfft(dev, 4) = [0, -2+2j, -2], powers [0, 4, 1], energy 5
    vec = features.series_features(np.array([1.0, 2.0, 3.0, 4.0]), fs=8.0)
    expected = {
        "mean": 2.5,
        "std": np.sqrt(1.25),
        "rms": np.sqrt(7.5),
        "arv": 1.0,
        "p25": 1.75,
        "p75": 3.25,
        "iqr": 1.5,
        "skewness": 0.0,
        "kurtosis": 2.5625 / 1.5625 - 3.0,
        "spectral_energy": 5.0,
        "spectral_entropy": -(0.8 * np.log(0.8) + 0.2 * np.log(0.2)),
        "dominant_freq_hz": 2.0,
        "dominant_power": 4.0,
        "dominant_phase": 3.0 * np.pi / 4.0,
    }
    for name, value in expected.items():
        got = vec[features.FEATURE_NAMES.index(name)]
        assert got == pytest.approx(value, rel=1e-12, abs=1e-12), name


def test_constant_series():
    vec = features.series_features(np.full(16, 3.7), fs=100.0)
    named = dict(zip(features.FEATURE_NAMES, vec))
    assert named["mean"] == pytest.approx(3.7)
    assert named["std"] == 0.0
    assert named["rms"] == pytest.approx(3.7)
    assert named["skewness"] == 0.0
    assert named["kurtosis"] == 0.0
    assert named["spectral_energy"] == pytest.approx(0.0, abs=1e-24)
    assert named["dominant_freq_hz"] == 0.0


def test_pure_sine_dominant_bin():
    fs = 128.0
    t = np.arange(256) / fs
    vec = features.series_features(np.sin(2.0 * np.pi * 8.0 * t), fs)
    named = dict(zip(features.FEATURE_NAMES, vec))
    assert named["dominant_freq_hz"] == pytest.approx(8.0)
    # a bin-aligned sine concentrates its energy in a single bin
    assert named["dominant_power"] == pytest.approx(named["spectral_energy"], rel=1e-9)
    assert named["spectral_entropy"] == pytest.approx(0.0, abs=1e-9)


def test_energy_parseval_random(rng):
    for _ in range(20):
        x = rng.standard_normal(int(rng.integers(8, 200)))
        vec = features.series_features(x, fs=50.0)
        named = dict(zip(features.FEATURE_NAMES, vec))
        dev_energy = float(np.sum((x - x.mean()) ** 2))
        assert named["spectral_energy"] == pytest.approx(dev_energy, rel=1e-9)


def test_matches_oracle_random(rng):
    for _ in range(100):
        n = int(rng.integers(4, 160))
        x = rng.standard_normal(n) * rng.uniform(0.1, 5.0) + rng.uniform(-3.0, 3.0)
        fs = float(rng.uniform(10.0, 500.0))
        got = features.series_features(x, fs)
        want = oracles.series_features(x, fs)
        np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-9)


def test_scale_only_affects_scale_features(rng):
    x = rng.standard_normal(64)
    a = features.series_features(x, fs=100.0)
    b = features.series_features(2.0 * x, fs=100.0)
    names = features.FEATURE_NAMES
    for invariant in ("skewness", "kurtosis", "spectral_entropy",
                      "dominant_freq_hz", "dominant_phase"):
        i = names.index(invariant)
        assert b[i] == pytest.approx(a[i], rel=1e-9, abs=1e-12), invariant
    for linear in ("std", "rms", "arv", "iqr"):
        i = names.index(linear)
        assert b[i] == pytest.approx(2.0 * a[i], rel=1e-9), linear


def test_too_short_raises():
    with pytest.raises(SegmentTooShort):
        features.series_features(np.array([1.0, 2.0, 3.0]), fs=10.0)
    with pytest.raises(SegmentTooShort):
        features.series_features(np.zeros((4, 2)), fs=10.0)
