"""End-to-end processing: preprocess, segment, detect, classify, count.

run_pipeline wires the analysis stages together under one validated
configuration and produces a deterministic, JSON-serialisable result.
Per-subcarrier filtering and per-interval chew analysis can fan out
over worker threads; results are merged in index order so the output
bytes do not depend on the worker count.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import chewing, eating, preprocess, segmentation, utensils
from .errors import InvalidConfig
from .trace_io import CsiTrace


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of the pipeline, with working defaults."""

    hampel_window: int = 11
    hampel_k: float = 3.0
    notch_low_hz: float | None = None
    notch_high_hz: float | None = None
    band_low_hz: float = 0.8
    band_high_hz: float = 3.0
    band_order: int = 4
    zero_phase: bool = True
    variance_window_s: float = 1.0
    spec_window_s: float = 1.0
    spec_hop_s: float = 0.25
    ste_window_bins: int = 9
    eps_rel: float = 0.01
    noise_guard: float = 4.0
    min_gap_s: float = 0.5
    min_len_s: float = 0.8
    recon_window_s: float = 0.25
    recon_keep: int = 10
    recon_detrend_s: float | None = 2.0
    beta_scale: float = 0.7
    beta_fallback_s: float = 0.5
    gamma_scale: float = 1.1
    min_prominence_db: float = 3.0
    min_interval_s: float = 2.5
    softmax_temperature: float = 1.0
    svm_epochs: int = 200
    svm_lambda: float = 1e-3
    seed: int = 0
    workers: int = 1
    include_diagnostics: bool = True

    def validate(self) -> None:
        if self.hampel_window < 3 or self.hampel_window % 2 == 0:
            raise InvalidConfig(f"hampel_window must be odd >= 3, got {self.hampel_window}")
        if self.hampel_k <= 0:
            raise InvalidConfig(f"hampel_k must be positive, got {self.hampel_k}")
        if not (0 < self.band_low_hz < self.band_high_hz):
            raise InvalidConfig(f"band [{self.band_low_hz}, {self.band_high_hz}] invalid")
        if (self.notch_low_hz is None) != (self.notch_high_hz is None):
            raise InvalidConfig("notch band needs both edges or neither")
        if self.spec_window_s <= 0 or self.spec_hop_s <= 0:
            raise InvalidConfig("spectrogram window and hop must be positive")
        if self.ste_window_bins < 3 or self.ste_window_bins % 2 == 0:
            raise InvalidConfig(f"ste_window_bins must be odd >= 3, got {self.ste_window_bins}")
        if not (0 < self.eps_rel <= 1):
            raise InvalidConfig(f"eps_rel must lie in (0, 1], got {self.eps_rel}")
        if self.min_gap_s < 0 or self.min_len_s <= 0:
            raise InvalidConfig("min_gap_s must be >= 0 and min_len_s > 0")
        if self.recon_window_s <= 0 or not (1 <= self.recon_keep <= 30):
            raise InvalidConfig("recon_window_s must be > 0 and recon_keep in [1, 30]")
        if self.recon_detrend_s is not None and self.recon_detrend_s <= 0:
            raise InvalidConfig("recon_detrend_s must be positive or null")
        if self.beta_scale <= 0 or self.beta_fallback_s <= 0 or self.gamma_scale < 0:
            raise InvalidConfig("peak detection scales must be positive")
        if self.min_interval_s < 2.0:
            raise InvalidConfig("min_interval_s must be >= 2.0 (APSD needs 2 s of data)")
        if self.svm_epochs < 1 or self.svm_lambda <= 0:
            raise InvalidConfig("svm_epochs must be >= 1 and svm_lambda > 0")
        if self.workers < 1:
            raise InvalidConfig(f"workers must be >= 1, got {self.workers}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        unknown = sorted(set(d) - {f for f in cls.__dataclass_fields__})
        if unknown:
            raise InvalidConfig(f"unknown config keys: {unknown}")
        cfg = cls(**d)
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class SegmentReport:
    segment: segmentation.ActivitySegment
    eating: bool | None = None
    eating_distance: float | None = None
    utensil: str | None = None
    fused_scores: list[float] | None = None
    prob_mass_total: float | None = None


@dataclass(frozen=True)
class PipelineResult:
    config: PipelineConfig
    segments: list[SegmentReport]
    chew_swallow: list[chewing.ChewSwallowReport]
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        segs = []
        for rep in self.segments:
            segs.append(
                {
                    "start_idx": rep.segment.start_idx,
                    "end_idx": rep.segment.end_idx,
                    "start_s": rep.segment.start_s,
                    "end_s": rep.segment.end_s,
                    "eating": rep.eating,
                    "eating_distance": rep.eating_distance,
                    "utensil": rep.utensil,
                    "fused_scores": rep.fused_scores,
                    "prob_mass_total": rep.prob_mass_total,
                }
            )
        reports = []
        for rep in self.chew_swallow:
            reports.append(
                {
                    "interval": {
                        "start_idx": rep.interval.start_idx,
                        "end_idx": rep.interval.end_idx,
                        "start_s": rep.interval.start_s,
                        "end_s": rep.interval.end_s,
                    },
                    "chew_count": rep.chew_count,
                    "swallow_count": rep.swallow_count,
                    "chew_times_s": rep.chew_times_s,
                    "swallow_times_s": rep.swallow_times_s,
                    "chew_rate_hz": rep.chew_rate_hz,
                }
            )
        return {
            "config": self.config.to_dict(),
            "segments": segs,
            "chew_swallow": reports,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _map_columns(matrix: np.ndarray, fn, workers: int) -> np.ndarray:
    cols = range(matrix.shape[1])
    if workers <= 1:
        results = [fn(matrix[:, i]) for i in cols]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: fn(matrix[:, i]), cols))
    return np.column_stack(results)


def run_pipeline(trace: CsiTrace, config: PipelineConfig,
                 detector: eating.EatingDetector | None = None,
                 utensil_model: utensils.UtensilModel | None = None) -> PipelineResult:
    """Run every stage that has its inputs available.

    Eating verdicts need a detector; utensil decisions additionally need
    a model; chew/swallow analysis needs eating verdicts to carve out
    the inter-delivery intervals.
    """
    config.validate()
    fs = trace.sample_rate_hz

    def clean_col(col: np.ndarray) -> np.ndarray:
        return preprocess.remove_outliers(col, config.hampel_window, config.hampel_k)

    cleaned_amp = _map_columns(trace.amplitudes, clean_col, config.workers)
    cleaned = trace.with_amplitudes(cleaned_amp)

    filter_spec = preprocess.FilterSpec(
        low_hz=config.band_low_hz,
        high_hz=config.band_high_hz,
        order=config.band_order,
        zero_phase=config.zero_phase,
        notch_low_hz=config.notch_low_hz,
        notch_high_hz=config.notch_high_hz,
    )

    def band_col(col: np.ndarray) -> np.ndarray:
        return preprocess.bandpass(col, fs, filter_spec)

    banded_amp = _map_columns(cleaned_amp, band_col, config.workers)

    fused = cleaned_amp.mean(axis=1)
    var_win = max(2, int(round(config.variance_window_s * fs)))
    # local RMS of the fused series; sqrt keeps burst energy proportional
    # to envelope amplitude to the fourth power instead of the eighth,
    # which the relative STE threshold needs to see small motions
    envelope = np.sqrt(preprocess.moving_variance(fused, var_win))
    spec = segmentation.spectrogram(envelope, fs, config.spec_window_s, config.spec_hop_s)
    cpsd = segmentation.cumulative_psd(spec.power)
    ste = segmentation.short_time_energy(cpsd, config.ste_window_bins)
    segments = segmentation.segment_activities(
        ste,
        fs=fs,
        eps_rel=config.eps_rel,
        min_gap_s=config.min_gap_s,
        min_len_s=config.min_len_s,
        hop_s=config.spec_hop_s,
        time_offset_s=config.spec_window_s / 2.0,
        noise_guard=config.noise_guard,
        n_samples=trace.n_samples,
    )

    reports: list[SegmentReport] = []
    for seg in segments:
        rep = SegmentReport(segment=seg)
        if detector is not None:
            vec = eating.segment_feature_vector(cleaned, seg)
            dist = eating.eating_distance(detector, vec)
            verdict = dist <= detector.threshold
            rep = replace(rep, eating=verdict, eating_distance=dist)
            if verdict and utensil_model is not None:
                decision = utensils.classify_segment(utensil_model, cleaned, seg)
                rep = replace(
                    rep,
                    utensil=decision.label,
                    fused_scores=[float(v) for v in decision.fused_scores],
                    prob_mass_total=decision.prob_mass_total,
                )
        reports.append(rep)

    banded = trace.with_amplitudes(banded_amp)
    intervals: list[segmentation.ActivitySegment] = []
    eating_segs = [r.segment for r in reports if r.eating]
    for prev, nxt in zip(eating_segs, eating_segs[1:]):
        gap_s = nxt.start_s - prev.end_s
        if gap_s >= config.min_interval_s:
            intervals.append(
                segmentation.ActivitySegment(
                    start_idx=prev.end_idx,
                    end_idx=nxt.start_idx,
                    start_s=prev.end_s,
                    end_s=nxt.start_s,
                )
            )

    t0 = float(trace.timestamps[0]) if trace.n_samples else 0.0
    diag_intervals: list[dict] = []

    def analyse(interval: segmentation.ActivitySegment):
        recon = chewing.reconstruct(
            banded, interval, window_s=config.recon_window_s, keep=config.recon_keep,
            detrend_s=config.recon_detrend_s
        )
        spectrum = chewing.apsd(banded, interval)
        rate = chewing.estimate_chew_rate(
            spectrum,
            band_low_hz=config.band_low_hz,
            band_high_hz=config.band_high_hz,
            min_prominence_db=config.min_prominence_db,
        )
        beta = chewing.default_beta_s(rate, config.beta_scale, config.beta_fallback_s)
        gamma = chewing.default_gamma(recon, config.gamma_scale)
        pairs = chewing.detect_peaks(recon, beta, gamma)
        report = chewing.count_chews_swallows(
            recon, pairs, chew_rate_hz=rate, time_origin_s=t0
        )
        return recon, spectrum, report

    if config.workers <= 1 or len(intervals) <= 1:
        analysed = [analyse(iv) for iv in intervals]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            analysed = list(pool.map(analyse, intervals))

    chew_reports = [rep for _, _, rep in analysed]
    diagnostics: dict = {}
    if config.include_diagnostics:
        theta = None
        if ste.size and np.any(ste > 0):
            theta = max(
                config.eps_rel * float(ste.max()),
                config.noise_guard * float(np.median(ste)),
            )
        for recon, spectrum, _ in analysed:
            diag_intervals.append(
                {
                    "start_s": recon.interval.start_s,
                    "end_s": recon.interval.end_s,
                    "apsd_freqs_hz": [float(v) for v in spectrum.freqs_hz],
                    "apsd_db": [float(v) for v in spectrum.db],
                    "reconstruction": [float(v) for v in recon.values],
                    "source_subcarrier": [int(v) for v in recon.source_subcarrier],
                }
            )
        diagnostics = {
            "ste": [float(v) for v in ste],
            "ste_times_s": [float(v) for v in spec.times_s],
            "ste_threshold": theta,
            "intervals": diag_intervals,
        }

    return PipelineResult(
        config=config,
        segments=reports,
        chew_swallow=chew_reports,
        diagnostics=diagnostics,
    )


def _write_csv(path, header: str, rows: list[str]) -> None:
    payload = "\n".join([header] + rows) + "\n"
    with open(path, "wb") as fh:
        fh.write(payload.encode("utf-8"))


def emit_plot_data(result: PipelineResult, out_dir) -> list[str]:
    """Write plot-ready CSV files into out_dir; returns written names.

    segments.csv and ste.csv always exist (header-only when empty);
    apsd_NN.csv and reconstruction_NN.csv appear per analysed interval
    when diagnostics were recorded.
    """
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []

    rows = []
    for rep in result.segments:
        rows.append(
            ",".join(
                [
                    repr(rep.segment.start_s),
                    repr(rep.segment.end_s),
                    "" if rep.eating is None else str(int(rep.eating)),
                    rep.utensil or "",
                ]
            )
        )
    _write_csv(os.path.join(out_dir, "segments.csv"), "start_s,end_s,eating,utensil", rows)
    written.append("segments.csv")

    diag = result.diagnostics
    ste = diag.get("ste", [])
    times = diag.get("ste_times_s", [])
    theta = diag.get("ste_threshold")
    rows = [
        ",".join([repr(float(t)), repr(float(v)), "" if theta is None else repr(float(theta))])
        for t, v in zip(times, ste)
    ]
    _write_csv(os.path.join(out_dir, "ste.csv"), "time_s,ste,threshold", rows)
    written.append("ste.csv")

    for k, iv in enumerate(diag.get("intervals", [])):
        name = f"apsd_{k:02d}.csv"
        rows = [
            ",".join([repr(float(f)), repr(float(d))])
            for f, d in zip(iv["apsd_freqs_hz"], iv["apsd_db"])
        ]
        _write_csv(os.path.join(out_dir, name), "freq_hz,db", rows)
        written.append(name)
        name = f"reconstruction_{k:02d}.csv"
        start = float(iv["start_s"])
        rows = []
        values = iv["reconstruction"]
        sources = iv["source_subcarrier"]
        n = len(values)
        dur = float(iv["end_s"]) - start
        step = dur / n if n else 0.0
        for i, (v, s) in enumerate(zip(values, sources)):
            rows.append(",".join([repr(start + i * step), repr(float(v)), str(int(s))]))
        _write_csv(os.path.join(out_dir, name), "time_s,value,subcarrier", rows)
        written.append(name)
    return written
