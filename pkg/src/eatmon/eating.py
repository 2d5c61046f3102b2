"""Eating vs non-eating discrimination for activity segments.

A segment is summarised by the 14 features of its standardised
mean-across-subcarrier series, z-scored with training statistics and
projected onto the two leading principal components. Training clusters
the projections with deterministic k-means (k=2); at test time a
segment counts as eating when its projection lands within a calibrated
distance of the eating cluster centroid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData, InsufficientData, ModelFormatError
from .features import N_FEATURES, series_features
from .segmentation import ActivitySegment
from .trace_io import CsiTrace

_KMEANS_MAX_ITER = 100
_KMEANS_TOL = 1e-8


@dataclass(frozen=True)
class EatingDetector:
    """Frozen training artefacts of the eating detector.

    feature_mean/feature_scale hold the z-scoring statistics; columns
    with zero training variance are masked out of the projection.
    cluster_separation records the training distance between the two
    k-means centroids.
    """

    feature_mean: np.ndarray  # (14,)
    feature_scale: np.ndarray  # (14,)
    active_mask: np.ndarray  # (14,) 0/1
    components: np.ndarray  # (2, 14) orthonormal rows
    eating_centroid: np.ndarray  # (2,)
    other_centroid: np.ndarray  # (2,)
    threshold: float
    cluster_separation: float


def segment_feature_vector(trace: CsiTrace, segment: ActivitySegment) -> np.ndarray:
    """14 features of the mean-across-subcarriers series of a segment.

    The series is standardised to zero mean and unit variance first, so
    the vector describes the shape and spectral signature of the motion
    rather than its vigour; scale-pinned entries (mean, std, rms) become
    constants and drop out through the zero-variance mask at fit time.
    """
    series = trace.amplitudes[segment.start_idx : segment.end_idx].mean(axis=1)
    spread = float(series.std())
    if spread > 1e-12:
        series = (series - float(series.mean())) / spread
    return series_features(series, trace.sample_rate_hz)


def _zscore_stats(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    mask = (std > 1e-12 * np.maximum(1.0, np.abs(mean))).astype(np.float64)
    scale = np.where(mask > 0, std, 1.0)
    return mean, scale, mask


def _pca2(z: np.ndarray) -> np.ndarray:
    _, _, vt = np.linalg.svd(z, full_matrices=False)
    comps = vt[:2].copy()
    if comps.shape[0] < 2:
        raise DegenerateData("need at least 2 non-degenerate feature dimensions")
    for row in comps:
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0:
            row *= -1.0
    return comps


def _kmeans2(points: np.ndarray, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic k-means++ with k=2; ties go to the lower index."""
    rng = np.random.default_rng(seed)
    n = points.shape[0]
    first = int(rng.integers(n))
    d2 = np.sum((points - points[first]) ** 2, axis=1)
    total = float(d2.sum())
    if total <= 0.0:
        second = (first + 1) % n
    else:
        second = int(rng.choice(n, p=d2 / total))
    centers = points[[first, second]].astype(np.float64).copy()
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(_KMEANS_MAX_ITER):
        dists = np.linalg.norm(points[:, None, :] - centers[None, :, :], axis=2)
        assign = np.argmin(dists, axis=1)
        new_centers = centers.copy()
        for k in range(2):
            member = points[assign == k]
            if member.shape[0] > 0:
                new_centers[k] = member.mean(axis=0)
        shift = float(np.linalg.norm(new_centers - centers))
        centers = new_centers
        if shift < _KMEANS_TOL:
            break
    return centers, assign


def fit_detector(eating_vectors: np.ndarray, noneating_vectors: np.ndarray, *,
                 seed: int = 0, threshold_scale: float = 1.5,
                 threshold_percentile: float = 95.0) -> EatingDetector:
    """Fit the detector from labelled 14-feature vectors.

    The decision radius is threshold_scale times the
    threshold_percentile-th percentile of the eating training points'
    distances to the eating centroid.
    """
    eat = np.asarray(eating_vectors, dtype=np.float64)
    non = np.asarray(noneating_vectors, dtype=np.float64)
    if eat.ndim != 2 or non.ndim != 2 or eat.shape[1] != N_FEATURES or non.shape[1] != N_FEATURES:
        raise InsufficientData(f"expected (n, {N_FEATURES}) arrays, got {eat.shape} and {non.shape}")
    if eat.shape[0] < 2 or non.shape[0] < 2:
        raise InsufficientData(
            f"need >= 2 vectors per class, got {eat.shape[0]} eating / {non.shape[0]} non-eating"
        )
    x = np.vstack([eat, non])
    mean, scale, mask = _zscore_stats(x)
    if float(mask.sum()) < 2:
        raise DegenerateData("fewer than 2 features carry variance")
    z = (x - mean) / scale * mask
    comps = _pca2(z)
    proj = z @ comps.T
    centers, assign = _kmeans2(proj, seed)

    n_eat = eat.shape[0]
    eat_in_0 = int(np.sum(assign[:n_eat] == 0))
    eat_in_1 = n_eat - eat_in_0
    if eat_in_0 == eat_in_1:
        eat_mean = proj[:n_eat].mean(axis=0)
        eating_idx = int(np.argmin(np.linalg.norm(centers - eat_mean, axis=1)))
    else:
        eating_idx = 0 if eat_in_0 > eat_in_1 else 1
    mu_eat = centers[eating_idx]
    mu_other = centers[1 - eating_idx]

    eat_dist = np.linalg.norm(proj[:n_eat] - mu_eat, axis=1)
    threshold = threshold_scale * float(np.percentile(eat_dist, threshold_percentile))
    return EatingDetector(
        feature_mean=mean,
        feature_scale=scale,
        active_mask=mask,
        components=comps,
        eating_centroid=mu_eat,
        other_centroid=mu_other,
        threshold=threshold,
        cluster_separation=float(np.linalg.norm(mu_eat - mu_other)),
    )


def project(detector: EatingDetector, features: np.ndarray) -> np.ndarray:
    z = (np.asarray(features, dtype=np.float64) - detector.feature_mean)
    z = z / detector.feature_scale * detector.active_mask
    return detector.components @ z


def eating_distance(detector: EatingDetector, features: np.ndarray) -> float:
    """Distance of a feature vector to the eating centroid in PC space."""
    return float(np.linalg.norm(project(detector, features) - detector.eating_centroid))


def is_eating(detector: EatingDetector, features: np.ndarray) -> bool:
    return eating_distance(detector, features) <= detector.threshold


def detector_to_dict(det: EatingDetector) -> dict:
    return {
        "feature_mean": det.feature_mean.tolist(),
        "feature_scale": det.feature_scale.tolist(),
        "active_mask": det.active_mask.tolist(),
        "components": det.components.tolist(),
        "eating_centroid": det.eating_centroid.tolist(),
        "other_centroid": det.other_centroid.tolist(),
        "threshold": det.threshold,
        "cluster_separation": det.cluster_separation,
    }


def detector_from_dict(d: dict) -> EatingDetector:
    try:
        return EatingDetector(
            feature_mean=np.asarray(d["feature_mean"], dtype=np.float64),
            feature_scale=np.asarray(d["feature_scale"], dtype=np.float64),
            active_mask=np.asarray(d["active_mask"], dtype=np.float64),
            components=np.asarray(d["components"], dtype=np.float64),
            eating_centroid=np.asarray(d["eating_centroid"], dtype=np.float64),
            other_centroid=np.asarray(d["other_centroid"], dtype=np.float64),
            threshold=float(d["threshold"]),
            cluster_separation=float(d["cluster_separation"]),
        )
    except KeyError as exc:
        raise ModelFormatError(f"detector document missing field {exc}") from None
