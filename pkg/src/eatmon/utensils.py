"""Eating-motion classification by utensil with soft-decision fusion.

Each eating segment yields one 14-feature row per subcarrier. A single
set of linear one-vs-rest hinge-loss classifiers (shared across
subcarriers, trained by deterministic full-batch subgradient descent)
scores every row; softmax turns margins into per-subcarrier class
probabilities, and the fused decision is the variance-weighted sum of
those probabilities, which outperforms hard majority voting whenever a
minority of subcarriers is confident and the rest are ambivalent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, ModelFormatError, SingleClass
from .features import FEATURE_NAMES, N_FEATURES, series_features
from .segmentation import ActivitySegment
from .trace_io import N_SUBCARRIERS, CsiTrace

UTENSIL_CLASSES = ("fork", "knife_fork", "spoon", "hand")


@dataclass(frozen=True)
class UtensilModel:
    """Linear one-vs-rest model plus per-subcarrier feature scaling."""

    classes: tuple[str, ...]
    weights: np.ndarray  # (n_classes, 14)
    biases: np.ndarray  # (n_classes,)
    feature_mean: np.ndarray  # (30, 14)
    feature_scale: np.ndarray  # (30, 14)
    temperature: float = 1.0


@dataclass(frozen=True)
class UtensilDecision:
    """Fused verdict for one segment.

    fused_scores sums to the total weight mass (1 for normalised
    weights); prob_mass_total is the grand total of the per-subcarrier
    probability matrix before weighting, reported for diagnostics.
    """

    label: str
    fused_scores: np.ndarray  # (n_classes,)
    per_subcarrier_probs: np.ndarray  # (30, n_classes)
    prob_mass_total: float


def extract_features(trace: CsiTrace, segment: ActivitySegment) -> np.ndarray:
    """Per-subcarrier feature matrix (30 x 14) for one segment."""
    block = trace.amplitudes[segment.start_idx : segment.end_idx]
    rows = [series_features(block[:, i], trace.sample_rate_hz) for i in range(N_SUBCARRIERS)]
    return np.vstack(rows)


def _standardize_stats(stack: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # stack: (n_segments, 30, 14)
    mean = stack.mean(axis=0)
    std = stack.std(axis=0)
    scale = np.where(std > 1e-12, std, 1.0)
    return mean, scale


def _train_binary(x: np.ndarray, y: np.ndarray, epochs: int, lam: float) -> tuple[np.ndarray, float]:
    """Full-batch subgradient descent on the L2-regularised hinge loss."""
    n, d = x.shape
    w = np.zeros(d)
    b = 0.0
    for t in range(1, epochs + 1):
        lr = 1.0 / (lam * t)
        margins = y * (x @ w + b)
        viol = margins < 1.0
        if np.any(viol):
            grad_w = lam * w - (y[viol, None] * x[viol]).sum(axis=0) / n
            grad_b = -float(y[viol].sum()) / n
        else:
            grad_w = lam * w
            grad_b = 0.0
        w = w - lr * grad_w
        b = b - lr * grad_b
    return w, b


def train(dataset: list[tuple[np.ndarray, str]], *, epochs: int = 200, lam: float = 1e-3,
          seed: int = 0, temperature: float = 1.0) -> UtensilModel:
    """Train from (30 x 14 feature matrix, label) pairs.

    Every matrix expands to 30 rows standardized with per-subcarrier
    statistics; one hinge classifier per class is fit on the shared row
    pool. Training is deterministic for fixed inputs and seed.
    """
    if len(dataset) < 4:
        raise InsufficientData(f"need at least 4 labelled segments, got {len(dataset)}")
    labels = [label for _, label in dataset]
    classes = tuple(c for c in UTENSIL_CLASSES if c in labels)
    unknown = sorted(set(labels) - set(UTENSIL_CLASSES))
    if unknown:
        raise InsufficientData(f"unknown labels {unknown}; expected {UTENSIL_CLASSES}")
    if len(classes) < 2:
        raise SingleClass(f"need >= 2 distinct classes, got {classes}")
    for c in classes:
        if labels.count(c) < 2:
            raise InsufficientData(f"class {c!r} has fewer than 2 segments")

    stack = np.stack([np.asarray(m, dtype=np.float64) for m, _ in dataset])
    if stack.shape[1:] != (N_SUBCARRIERS, N_FEATURES):
        raise InsufficientData(
            f"feature matrices must be {N_SUBCARRIERS} x {N_FEATURES}, got {stack.shape[1:]}"
        )
    mean, scale = _standardize_stats(stack)
    z = (stack - mean) / scale

    x = z.reshape(-1, N_FEATURES)
    row_labels = np.repeat(np.array([classes.index(l) for l in labels]), N_SUBCARRIERS)
    order = np.random.default_rng(seed).permutation(x.shape[0])
    x = x[order]
    row_labels = row_labels[order]

    weights = np.zeros((len(classes), N_FEATURES))
    biases = np.zeros(len(classes))
    for k in range(len(classes)):
        y = np.where(row_labels == k, 1.0, -1.0)
        weights[k], biases[k] = _train_binary(x, y, epochs, lam)
    return UtensilModel(
        classes=classes,
        weights=weights,
        biases=biases,
        feature_mean=mean,
        feature_scale=scale,
        temperature=temperature,
    )


def subcarrier_probs(model: UtensilModel, matrix: np.ndarray) -> np.ndarray:
    """Softmax class probabilities per subcarrier row (30 x n_classes)."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.shape != (N_SUBCARRIERS, N_FEATURES):
        raise InsufficientData(f"expected a {N_SUBCARRIERS} x {N_FEATURES} matrix, got {m.shape}")
    z = (m - model.feature_mean) / model.feature_scale
    margins = z @ model.weights.T + model.biases
    t = max(model.temperature, 1e-12)
    logits = margins / t
    logits = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(logits)
    return e / e.sum(axis=1, keepdims=True)


def subcarrier_weights(trace: CsiTrace, segment: ActivitySegment) -> np.ndarray:
    """Per-subcarrier amplitude variance over the segment, normalised to
    sum 1; uniform when every subcarrier is flat."""
    block = trace.amplitudes[segment.start_idx : segment.end_idx]
    var = block.var(axis=0)
    total = float(var.sum())
    if total <= 0.0:
        return np.full(N_SUBCARRIERS, 1.0 / N_SUBCARRIERS)
    return var / total


def soft_decision(probs: np.ndarray, weights: np.ndarray,
                  classes: tuple[str, ...] = UTENSIL_CLASSES) -> UtensilDecision:
    """Weighted sum of per-subcarrier probabilities; argmax wins and
    ties resolve in class declaration order."""
    p = np.asarray(probs, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != w.shape[0]:
        raise InsufficientData(f"probs {p.shape} and weights {w.shape} do not align")
    fused = (w[:, None] * p).sum(axis=0)
    label = classes[int(np.argmax(fused))]
    return UtensilDecision(
        label=label,
        fused_scores=fused,
        per_subcarrier_probs=p,
        prob_mass_total=float(p.sum()),
    )


def classify_segment(model: UtensilModel, trace: CsiTrace,
                     segment: ActivitySegment) -> UtensilDecision:
    probs = subcarrier_probs(model, extract_features(trace, segment))
    weights = subcarrier_weights(trace, segment)
    return soft_decision(probs, weights, classes=model.classes)


def model_to_dict(model: UtensilModel) -> dict:
    return {
        "classes": list(model.classes),
        "weights": model.weights.tolist(),
        "biases": model.biases.tolist(),
        "feature_mean": model.feature_mean.tolist(),
        "feature_scale": model.feature_scale.tolist(),
        "temperature": model.temperature,
        "feature_names": list(FEATURE_NAMES),
    }


def model_from_dict(d: dict) -> UtensilModel:
    try:
        return UtensilModel(
            classes=tuple(d["classes"]),
            weights=np.asarray(d["weights"], dtype=np.float64),
            biases=np.asarray(d["biases"], dtype=np.float64),
            feature_mean=np.asarray(d["feature_mean"], dtype=np.float64),
            feature_scale=np.asarray(d["feature_scale"], dtype=np.float64),
            temperature=float(d.get("temperature", 1.0)),
        )
    except KeyError as exc:
        raise ModelFormatError(f"model document missing field {exc}") from None
