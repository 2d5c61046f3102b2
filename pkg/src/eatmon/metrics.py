"""Evaluation of pipeline outputs against ground truth.

Segments match when their IoU reaches 0.5 (greedy, best IoU first).
Counting metrics use percentage error |est - gt| / gt. The evaluate
helper consumes the plain-dict forms produced by the pipeline and the
generator so reports can be built from files alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroGroundTruth
from .segmentation import ActivitySegment


def percentage_error(estimate: float, ground_truth: float) -> float:
    if ground_truth == 0:
        raise ZeroGroundTruth("percentage error undefined for zero ground truth")
    return abs(estimate - ground_truth) / abs(ground_truth)


def segment_iou(a: ActivitySegment, b: ActivitySegment) -> float:
    inter = min(a.end_s, b.end_s) - max(a.start_s, b.start_s)
    if inter <= 0:
        return 0.0
    union = max(a.end_s, b.end_s) - min(a.start_s, b.start_s)
    return inter / union


def match_segments(predicted: list[ActivitySegment], truth: list[ActivitySegment],
                   min_iou: float = 0.5) -> list[tuple[int, int]]:
    """Greedy one-to-one matching by descending IoU; ties prefer lower
    indices. Returns (predicted_idx, truth_idx) pairs."""
    scored = []
    for i, p in enumerate(predicted):
        for j, t in enumerate(truth):
            iou = segment_iou(p, t)
            if iou >= min_iou:
                scored.append((-iou, i, j))
    scored.sort()
    used_p: set[int] = set()
    used_t: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for _, i, j in scored:
        if i in used_p or j in used_t:
            continue
        used_p.add(i)
        used_t.add(j)
        pairs.append((i, j))
    pairs.sort()
    return pairs


def confusion_matrix(true_labels: list[str], pred_labels: list[str],
                     classes: tuple[str, ...]) -> np.ndarray:
    """Counts[true, pred]; labels outside classes raise KeyError."""
    index = {c: k for k, c in enumerate(classes)}
    out = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(true_labels, pred_labels):
        out[index[t], index[p]] += 1
    return out


def accuracy_from_confusion(matrix: np.ndarray) -> float:
    m = np.asarray(matrix)
    total = int(m.sum())
    if total == 0:
        raise ZeroGroundTruth("empty confusion matrix")
    return float(np.trace(m)) / total


@dataclass(frozen=True)
class EvalReport:
    """Aggregated evaluation sections; absent sections stay None."""

    segmentation: dict | None = None
    eating: dict | None = None
    utensil: dict | None = None
    chew_swallow: dict | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "segmentation": self.segmentation,
            "eating": self.eating,
            "utensil": self.utensil,
            "chew_swallow": self.chew_swallow,
            "extra": self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _segment_from_dict(d: dict) -> ActivitySegment:
    return ActivitySegment(
        start_idx=int(d["start_idx"]),
        end_idx=int(d["end_idx"]),
        start_s=float(d["start_s"]),
        end_s=float(d["end_s"]),
    )


def evaluate(result: dict, truth: dict, *, min_iou: float = 0.5,
             utensil_classes: tuple[str, ...] = ("fork", "knife_fork", "spoon", "hand")) -> EvalReport:
    """Compare a pipeline result document against a ground truth document.

    Both arguments are the JSON-dict forms (pipeline result as written by
    the CLI, ground truth as written by the generator).
    """
    pred_segs = [_segment_from_dict(s) for s in result.get("segments", [])]
    true_segs = [_segment_from_dict(s) for s in truth.get("segments", [])]
    true_kinds = [s["kind"] for s in truth.get("segments", [])]
    pairs = match_segments(pred_segs, true_segs, min_iou=min_iou)

    boundary_errors: list[float] = []
    for i, j in pairs:
        boundary_errors.append(abs(pred_segs[i].start_s - true_segs[j].start_s))
        boundary_errors.append(abs(pred_segs[i].end_s - true_segs[j].end_s))
    segmentation = {
        "n_predicted": len(pred_segs),
        "n_truth": len(true_segs),
        "n_matched": len(pairs),
        "mean_boundary_error_s": float(np.mean(boundary_errors)) if boundary_errors else None,
        "max_boundary_error_s": float(np.max(boundary_errors)) if boundary_errors else None,
    }

    eating = None
    verdicts = [s.get("eating") for s in result.get("segments", [])]
    if any(v is not None for v in verdicts):
        correct = 0
        total = 0
        detected_eating = 0
        true_eating = 0
        for i, j in pairs:
            if verdicts[i] is None:
                continue
            truth_is_eating = true_kinds[j].startswith("delivery")
            total += 1
            true_eating += int(truth_is_eating)
            detected_eating += int(verdicts[i] and truth_is_eating)
            correct += int(bool(verdicts[i]) == truth_is_eating)
        eating = {
            "n_scored": total,
            "accuracy": correct / total if total else None,
            "detection_rate": detected_eating / true_eating if true_eating else None,
        }

    utensil = None
    pred_labels = []
    true_labels = []
    for i, j in pairs:
        label = result["segments"][i].get("utensil")
        if label is None or not true_kinds[j].startswith("delivery:"):
            continue
        pred_labels.append(label)
        true_labels.append(true_kinds[j].split(":", 1)[1])
    if pred_labels:
        cm = confusion_matrix(true_labels, pred_labels, utensil_classes)
        utensil = {
            "classes": list(utensil_classes),
            "confusion": cm.tolist(),
            "accuracy": accuracy_from_confusion(cm),
            "n_scored": len(pred_labels),
        }

    chew_swallow = None
    true_ivs = truth.get("intervals", [])
    pred_ivs = result.get("chew_swallow", [])
    if true_ivs and pred_ivs:
        chew_errors: list[float] = []
        swallow_errors: list[float] = []
        matched = 0
        for tv in true_ivs:
            best = None
            best_olap = 0.0
            for pv in pred_ivs:
                olap = min(tv["end_s"], pv["interval"]["end_s"]) - max(tv["start_s"], pv["interval"]["start_s"])
                if olap > best_olap:
                    best_olap = olap
                    best = pv
            if best is None:
                continue
            matched += 1
            if tv["chew_count"] > 0:
                chew_errors.append(percentage_error(best["chew_count"], tv["chew_count"]))
            if tv["swallow_count"] > 0:
                swallow_errors.append(percentage_error(best["swallow_count"], tv["swallow_count"]))
        chew_swallow = {
            "n_intervals": len(true_ivs),
            "n_matched": matched,
            "mean_chew_error": float(np.mean(chew_errors)) if chew_errors else None,
            "mean_swallow_error": float(np.mean(swallow_errors)) if swallow_errors else None,
        }

    return EvalReport(
        segmentation=segmentation,
        eating=eating,
        utensil=utensil,
        chew_swallow=chew_swallow,
    )
