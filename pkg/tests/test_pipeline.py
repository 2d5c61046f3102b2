"""End-to-end pipeline wiring, config validation, output determinism."""

import os
from dataclasses import replace

import numpy as np
import pytest

from eatmon import eating, pipeline, preprocess, synth, utensils
from eatmon.errors import InvalidConfig


def _make_trace(events, duration_s=30.0, seed=11, noise_std=0.03):
    scenario = synth.SynthScenario(
        duration_s=duration_s, seed=seed, noise_std=noise_std, events=tuple(events)
    )
    return synth.generate(scenario)


def _training_segments(seeds, events_fn):
    out = []
    for seed in seeds:
        trace, truth = _make_trace(events_fn(seed), duration_s=14.0, seed=seed)
        cleaned = trace.with_amplitudes(
            preprocess.apply_per_subcarrier(trace.amplitudes, preprocess.remove_outliers)
        )
        for seg, kind in truth.segments:
            out.append((cleaned, seg, kind))
    return out


@pytest.fixture(scope="module")
def trained():
    """Small detector and utensil model fitted on synthetic segments."""
    eat_rows = _training_segments(
        range(4),
        lambda s: [synth.delivery(4.0, synth.UTENSILS[s % 4])],
    )
    non_rows = _training_segments(
        range(4, 8),
        lambda s: [synth.non_eating(4.0, synth.NON_EATING_LABELS[s % 5], duration_s=4.0)],
    )
    eat_vecs = np.asarray([eating.segment_feature_vector(tr, seg) for tr, seg, _ in eat_rows])
    non_vecs = np.asarray([eating.segment_feature_vector(tr, seg) for tr, seg, _ in non_rows])
    detector = eating.fit_detector(eat_vecs, non_vecs, seed=0)

    ut_rows = _training_segments(
        range(8),
        lambda s: [synth.delivery(4.0, synth.UTENSILS[s % 4])],
    )
    data = [
        (utensils.extract_features(tr, seg), kind.split(":", 1)[1])
        for tr, seg, kind in ut_rows
    ]
    model = utensils.train(data, seed=0)
    return detector, model


@pytest.fixture(scope="module")
def meal_trace():
    """Two deliveries with a chew burst between them."""
    trace, truth = _make_trace(
        [
            synth.delivery(5.0, "fork"),
            synth.chew_burst(9.0, 1.6, 8),
            synth.delivery(20.0, "fork"),
        ],
        duration_s=30.0,
        seed=3,
    )
    return trace, truth


class TestConfigValidation:
    @pytest.mark.parametrize(
        "changes",
        [
            {"hampel_window": 4},
            {"hampel_window": 1},
            {"hampel_k": 0.0},
            {"band_low_hz": 3.0, "band_high_hz": 1.0},
            {"notch_low_hz": 1.0},
            {"spec_hop_s": 0.0},
            {"ste_window_bins": 4},
            {"eps_rel": 0.0},
            {"eps_rel": 1.5},
            {"min_len_s": 0.0},
            {"recon_keep": 0},
            {"recon_keep": 31},
            {"beta_scale": 0.0},
            {"min_interval_s": 1.0},
            {"svm_epochs": 0},
            {"workers": 0},
        ],
    )
    def test_bad_values_rejected(self, changes):
        cfg = replace(pipeline.PipelineConfig(), **changes)
        with pytest.raises(InvalidConfig):
            cfg.validate()

    def test_defaults_valid(self):
        pipeline.PipelineConfig().validate()

    def test_dict_round_trip(self):
        cfg = pipeline.PipelineConfig(eps_rel=0.02, workers=2)
        assert pipeline.PipelineConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_key_rejected(self):
        with pytest.raises(InvalidConfig, match="unknown config keys"):
            pipeline.PipelineConfig.from_dict({"not_a_field": 1})


class TestRunPipeline:
    def test_segments_found_without_models(self):
        trace, truth = _make_trace([synth.delivery(4.0, "fork")], duration_s=12.0, seed=7)
        result = pipeline.run_pipeline(trace, pipeline.PipelineConfig())
        assert len(result.segments) == 1
        rep = result.segments[0]
        assert rep.eating is None
        assert rep.utensil is None
        assert result.chew_swallow == []

    def test_full_run_populates_reports(self, meal_trace, trained):
        trace, truth = meal_trace
        detector, model = trained
        result = pipeline.run_pipeline(trace, pipeline.PipelineConfig(), detector, model)
        assert len(result.segments) == 2
        for rep in result.segments:
            assert rep.eating is True
            assert rep.eating_distance >= 0.0
            assert rep.utensil in model.classes
            assert len(rep.fused_scores) == len(model.classes)
        assert len(result.chew_swallow) == 1
        rep = result.chew_swallow[0]
        assert rep.interval.start_s == result.segments[0].segment.end_s
        assert rep.interval.end_s == result.segments[1].segment.start_s
        assert rep.chew_count > 0
        assert result.diagnostics["ste_threshold"] > 0
        assert len(result.diagnostics["intervals"]) == 1

    def test_short_gap_not_analysed(self, trained):
        detector, model = trained
        trace, _ = _make_trace(
            [synth.delivery(4.0, "fork"), synth.delivery(11.0, "fork")],
            duration_s=18.0,
            seed=9,
        )
        cfg = replace(pipeline.PipelineConfig(), min_interval_s=10.0)
        result = pipeline.run_pipeline(trace, cfg, detector, model)
        assert result.chew_swallow == []

    def test_no_diagnostics(self, meal_trace, trained):
        trace, _ = meal_trace
        detector, model = trained
        cfg = replace(pipeline.PipelineConfig(), include_diagnostics=False)
        result = pipeline.run_pipeline(trace, cfg, detector, model)
        assert result.diagnostics == {}

    def test_repeat_runs_byte_identical(self, meal_trace, trained):
        trace, _ = meal_trace
        detector, model = trained
        cfg = pipeline.PipelineConfig()
        a = pipeline.run_pipeline(trace, cfg, detector, model).to_json()
        b = pipeline.run_pipeline(trace, cfg, detector, model).to_json()
        assert a.encode() == b.encode()

    def test_worker_count_does_not_change_output(self, meal_trace, trained):
        trace, _ = meal_trace
        detector, model = trained
        base = pipeline.run_pipeline(
            trace, pipeline.PipelineConfig(workers=1), detector, model
        ).to_dict()
        for workers in (2, 4):
            other = pipeline.run_pipeline(
                trace, pipeline.PipelineConfig(workers=workers), detector, model
            ).to_dict()
            other["config"]["workers"] = 1
            assert other == base


class TestPlotData:
    def test_files_written(self, tmp_path, meal_trace, trained):
        trace, _ = meal_trace
        detector, model = trained
        result = pipeline.run_pipeline(trace, pipeline.PipelineConfig(), detector, model)
        names = pipeline.emit_plot_data(result, tmp_path)
        assert "segments.csv" in names
        assert "ste.csv" in names
        assert "apsd_00.csv" in names
        assert "reconstruction_00.csv" in names
        for name in names:
            assert os.path.exists(tmp_path / name)
        seg_lines = (tmp_path / "segments.csv").read_text().splitlines()
        assert seg_lines[0] == "start_s,end_s,eating,utensil"
        assert len(seg_lines) == 3

    def test_empty_result_headers_only(self, tmp_path):
        trace, _ = _make_trace([], duration_s=6.0, seed=1, noise_std=0.0)
        result = pipeline.run_pipeline(trace, pipeline.PipelineConfig())
        names = pipeline.emit_plot_data(result, tmp_path / "empty")
        assert names == ["segments.csv", "ste.csv"]
        lines = (tmp_path / "empty" / "segments.csv").read_text().splitlines()
        assert lines == ["start_s,end_s,eating,utensil"]

    def test_emitted_files_deterministic(self, tmp_path, meal_trace, trained):
        trace, _ = meal_trace
        detector, model = trained
        cfg = pipeline.PipelineConfig()
        result = pipeline.run_pipeline(trace, cfg, detector, model)
        pipeline.emit_plot_data(result, tmp_path / "a")
        result2 = pipeline.run_pipeline(trace, cfg, detector, model)
        names = pipeline.emit_plot_data(result2, tmp_path / "b")
        for name in names:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
