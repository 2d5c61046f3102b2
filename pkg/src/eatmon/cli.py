"""Command line interface.

Subcommands cover the full workflow: synth (render a scenario file to a
trace plus ground truth), preprocess, segment, train, detect-eating,
classify, chew-count, pipeline and metrics. Exit codes: 0 on success,
1 for input/usage errors, 2 for internal errors. All JSON and CSV
outputs are byte-deterministic for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import __version__, chewing, eating, metrics, pipeline, preprocess, segmentation
from . import synth as synthmod
from . import trace_io, utensils
from .errors import EatmonError, InvalidConfig, MalformedHeader, ModelFormatError


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; bad arguments are input errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_trace(path: str) -> trace_io.CsiTrace:
    with open(path, "rb") as fh:
        head = fh.read(5)
    if head == b"WIEC1":
        return trace_io.read_trace_bin(path)
    return trace_io.read_trace_csv(path)


def _save_trace(trace: trace_io.CsiTrace, path: str) -> None:
    if path.endswith(".bin"):
        trace_io.write_trace_bin(trace, path)
    else:
        trace_io.write_trace_csv(trace, path)


def _dump_json(obj, path: str) -> None:
    payload = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    with open(path, "wb") as fh:
        fh.write(payload.encode("utf-8"))


def _load_json(path: str) -> dict:
    with open(path, "rb") as fh:
        try:
            return json.loads(fh.read().decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise MalformedHeader(f"{path}: not valid JSON: {exc}") from None


def _segments_from_doc(doc: dict) -> list[dict]:
    segs = doc.get("segments")
    if segs is None:
        raise MalformedHeader("segments document has no 'segments' list")
    return segs


def _segment_obj(d: dict) -> segmentation.ActivitySegment:
    return segmentation.ActivitySegment(
        start_idx=int(d["start_idx"]),
        end_idx=int(d["end_idx"]),
        start_s=float(d["start_s"]),
        end_s=float(d["end_s"]),
    )


def _band(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise InvalidConfig(f"band must be LO:HI, got {text!r}") from None
    return lo, hi


def _config_from_args(args) -> pipeline.PipelineConfig:
    cfg = pipeline.PipelineConfig()
    if getattr(args, "config", None):
        cfg = pipeline.PipelineConfig.from_dict(_load_json(args.config))
    overrides = {}
    for name in ("seed", "workers", "eps_rel", "min_gap_s", "min_len_s"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "no_diagnostics", False):
        overrides["include_diagnostics"] = False
    if overrides:
        cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def _cmd_synth(args) -> int:
    with open(args.scenario, "rb") as fh:
        text = fh.read().decode("utf-8")
    scenario = synthmod.parse_scenario(text)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    trace, truth = synthmod.generate(scenario)
    _save_trace(trace, args.out)
    if args.truth:
        doc = synthmod.ground_truth_to_dict(truth)
        doc["scenario"] = synthmod.scenario_to_text(scenario)
        _dump_json(doc, args.truth)
    print(f"wrote {trace.n_samples} samples to {args.out}")
    return 0


def _cmd_preprocess(args) -> int:
    trace = _load_trace(args.input)
    amp = trace.amplitudes
    if not args.no_outlier_removal:
        amp = preprocess.apply_per_subcarrier(
            amp, lambda col: preprocess.remove_outliers(col, args.hampel_window, args.hampel_k)
        )
    if not args.no_band:
        notch = _band(args.notch) if args.notch else (None, None)
        spec = preprocess.FilterSpec(
            low_hz=args.band[0],
            high_hz=args.band[1],
            order=args.order,
            zero_phase=not args.causal,
            notch_low_hz=notch[0],
            notch_high_hz=notch[1],
        )
        amp = preprocess.apply_per_subcarrier(
            amp, lambda col: preprocess.bandpass(col, trace.sample_rate_hz, spec)
        )
        # the band-pass output oscillates around zero; shift into the
        # non-negative range the trace format requires
        amp = amp - amp.min()
    _save_trace(trace.with_amplitudes(amp), args.output)
    print(f"wrote {args.output}")
    return 0


def _cmd_segment(args) -> int:
    trace = _load_trace(args.input)
    cfg = _config_from_args(args)
    result = pipeline.run_pipeline(trace, cfg)
    doc = result.to_dict()
    out = {"config": doc["config"], "segments": doc["segments"]}
    _dump_json(out, args.out)
    if args.plot_dir:
        pipeline.emit_plot_data(result, args.plot_dir)
    print(f"found {len(result.segments)} segments")
    return 0


def _collect_training_data(bundles: list[str]):
    detector_eating = []
    detector_non = []
    utensil_data = []
    for spec in bundles:
        if ":" not in spec:
            raise InvalidConfig(f"bundle must be TRACE:TRUTH, got {spec!r}")
        trace_path, truth_path = spec.rsplit(":", 1)
        trace = _load_trace(trace_path)
        truth = synthmod.ground_truth_from_dict(_load_json(truth_path))
        cleaned = trace.with_amplitudes(
            preprocess.apply_per_subcarrier(trace.amplitudes, preprocess.remove_outliers)
        )
        for seg, kind in truth.segments:
            vec = eating.segment_feature_vector(cleaned, seg)
            if kind.startswith("delivery"):
                detector_eating.append(vec)
                label = kind.split(":", 1)[1]
                utensil_data.append((utensils.extract_features(cleaned, seg), label))
            else:
                detector_non.append(vec)
    return detector_eating, detector_non, utensil_data


def _cmd_train(args) -> int:
    import numpy as np

    eat_vecs, non_vecs, utensil_data = _collect_training_data(args.bundle)
    wrote = []
    if args.detector_out:
        det = eating.fit_detector(
            np.asarray(eat_vecs), np.asarray(non_vecs), seed=args.seed
        )
        _dump_json(
            {
                "eating_detector": eating.detector_to_dict(det),
                "trained_with": {"bundles": list(args.bundle), "seed": args.seed},
            },
            args.detector_out,
        )
        wrote.append(args.detector_out)
    if args.model_out:
        model = utensils.train(
            utensil_data,
            epochs=args.epochs,
            lam=args.svm_lambda,
            seed=args.seed,
            temperature=args.temperature,
        )
        _dump_json(
            {
                "utensil_model": utensils.model_to_dict(model),
                "trained_with": {
                    "bundles": list(args.bundle),
                    "epochs": args.epochs,
                    "lambda": args.svm_lambda,
                    "seed": args.seed,
                    "temperature": args.temperature,
                },
            },
            args.model_out,
        )
        wrote.append(args.model_out)
    if not wrote:
        raise InvalidConfig("nothing to do: pass --detector-out and/or --model-out")
    print("wrote " + ", ".join(wrote))
    return 0


def _load_detector(path: str) -> eating.EatingDetector:
    doc = _load_json(path)
    if "eating_detector" not in doc:
        raise ModelFormatError(f"{path}: missing 'eating_detector' object")
    return eating.detector_from_dict(doc["eating_detector"])


def _load_model(path: str) -> utensils.UtensilModel:
    doc = _load_json(path)
    if "utensil_model" not in doc:
        raise ModelFormatError(f"{path}: missing 'utensil_model' object")
    return utensils.model_from_dict(doc["utensil_model"])


def _cleaned(trace: trace_io.CsiTrace, cfg: pipeline.PipelineConfig) -> trace_io.CsiTrace:
    return trace.with_amplitudes(
        preprocess.apply_per_subcarrier(
            trace.amplitudes,
            lambda col: preprocess.remove_outliers(col, cfg.hampel_window, cfg.hampel_k),
        )
    )


def _cmd_detect_eating(args) -> int:
    trace = _load_trace(args.input)
    cfg = _config_from_args(args)
    detector = _load_detector(args.detector)
    cleaned = _cleaned(trace, cfg)
    out = []
    for entry in _segments_from_doc(_load_json(args.segments)):
        seg = _segment_obj(entry)
        vec = eating.segment_feature_vector(cleaned, seg)
        dist = eating.eating_distance(detector, vec)
        entry = dict(entry)
        entry["eating"] = bool(dist <= detector.threshold)
        entry["eating_distance"] = dist
        out.append(entry)
    _dump_json({"segments": out}, args.out)
    n_eat = sum(1 for e in out if e["eating"])
    print(f"{n_eat}/{len(out)} segments classified as eating")
    return 0


def _cmd_classify(args) -> int:
    trace = _load_trace(args.input)
    cfg = _config_from_args(args)
    model = _load_model(args.model)
    cleaned = _cleaned(trace, cfg)
    out = []
    for entry in _segments_from_doc(_load_json(args.segments)):
        if entry.get("eating") is False and not args.all_segments:
            out.append(dict(entry))
            continue
        seg = _segment_obj(entry)
        decision = utensils.classify_segment(model, cleaned, seg)
        entry = dict(entry)
        entry["utensil"] = decision.label
        entry["fused_scores"] = [float(v) for v in decision.fused_scores]
        entry["prob_mass_total"] = decision.prob_mass_total
        out.append(entry)
    _dump_json({"segments": out}, args.out)
    print(f"classified {sum(1 for e in out if e.get('utensil'))} segments")
    return 0


def _cmd_chew_count(args) -> int:
    trace = _load_trace(args.input)
    cfg = _config_from_args(args)
    entries = _segments_from_doc(_load_json(args.segments))
    flagged = [e for e in entries if e.get("eating")]
    anchors = flagged if flagged else entries
    segs = [_segment_obj(e) for e in anchors]

    cleaned = _cleaned(trace, cfg)
    spec = preprocess.FilterSpec(
        low_hz=cfg.band_low_hz,
        high_hz=cfg.band_high_hz,
        order=cfg.band_order,
        zero_phase=cfg.zero_phase,
        notch_low_hz=cfg.notch_low_hz,
        notch_high_hz=cfg.notch_high_hz,
    )
    banded = cleaned.with_amplitudes(
        preprocess.apply_per_subcarrier(
            cleaned.amplitudes,
            lambda col: preprocess.bandpass(col, trace.sample_rate_hz, spec),
        )
    )
    t0 = float(trace.timestamps[0]) if trace.n_samples else 0.0
    reports = []
    for prev, nxt in zip(segs, segs[1:]):
        if nxt.start_s - prev.end_s < cfg.min_interval_s:
            continue
        interval = segmentation.ActivitySegment(
            start_idx=prev.end_idx,
            end_idx=nxt.start_idx,
            start_s=prev.end_s,
            end_s=nxt.start_s,
        )
        recon = chewing.reconstruct(banded, interval, window_s=cfg.recon_window_s,
                                    keep=cfg.recon_keep, detrend_s=cfg.recon_detrend_s)
        spectrum = chewing.apsd(banded, interval)
        rate = chewing.estimate_chew_rate(
            spectrum,
            band_low_hz=cfg.band_low_hz,
            band_high_hz=cfg.band_high_hz,
            min_prominence_db=cfg.min_prominence_db,
        )
        beta = args.beta if args.beta is not None else chewing.default_beta_s(
            rate, cfg.beta_scale, cfg.beta_fallback_s
        )
        gamma = args.gamma if args.gamma is not None else chewing.default_gamma(
            recon, cfg.gamma_scale
        )
        pairs = chewing.detect_peaks(recon, beta, gamma)
        rep = chewing.count_chews_swallows(recon, pairs, chew_rate_hz=rate, time_origin_s=t0)
        reports.append(
            {
                "interval": {
                    "start_idx": interval.start_idx,
                    "end_idx": interval.end_idx,
                    "start_s": interval.start_s,
                    "end_s": interval.end_s,
                },
                "chew_count": rep.chew_count,
                "swallow_count": rep.swallow_count,
                "chew_times_s": rep.chew_times_s,
                "swallow_times_s": rep.swallow_times_s,
                "chew_rate_hz": rep.chew_rate_hz,
            }
        )
    _dump_json({"chew_swallow": reports}, args.out)
    total_chews = sum(r["chew_count"] for r in reports)
    total_swallows = sum(r["swallow_count"] for r in reports)
    print(f"{len(reports)} intervals: {total_chews} chews, {total_swallows} swallows")
    return 0


def _cmd_pipeline(args) -> int:
    trace = _load_trace(args.input)
    cfg = _config_from_args(args)
    detector = _load_detector(args.detector) if args.detector else None
    model = _load_model(args.model) if args.model else None
    result = pipeline.run_pipeline(trace, cfg, detector, model)
    payload = result.to_json() + "\n"
    with open(args.out, "wb") as fh:
        fh.write(payload.encode("utf-8"))
    if args.plot_dir:
        pipeline.emit_plot_data(result, args.plot_dir)
    n_eat = sum(1 for r in result.segments if r.eating)
    print(
        f"{len(result.segments)} segments ({n_eat} eating), "
        f"{len(result.chew_swallow)} chew intervals"
    )
    return 0


def _cmd_metrics(args) -> int:
    pred = _load_json(args.pred)
    truth = _load_json(args.truth)
    report = metrics.evaluate(pred, truth)
    _dump_json(report.to_dict(), args.out)
    if args.confusion_csv and report.utensil:
        classes = report.utensil["classes"]
        rows = ["true\\pred," + ",".join(classes)]
        for name, row in zip(classes, report.utensil["confusion"]):
            rows.append(name + "," + ",".join(str(int(v)) for v in row))
        with open(args.confusion_csv, "wb") as fh:
            fh.write(("\n".join(rows) + "\n").encode("utf-8"))
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eatmon", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="render a scenario file into a trace")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="trace path (.bin for binary, else CSV)")
    p.add_argument("--truth", help="optional ground-truth JSON path")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("preprocess", help="outlier removal and band-pass filtering")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--hampel-window", type=int, default=11)
    p.add_argument("--hampel-k", type=float, default=3.0)
    p.add_argument("--band", type=_band, default=(0.8, 3.0), help="band-pass LO:HI Hz")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--causal", action="store_true", help="disable zero-phase filtering")
    p.add_argument("--notch", help="optional band-stop LO:HI Hz")
    p.add_argument("--no-outlier-removal", action="store_true")
    p.add_argument("--no-band", action="store_true")
    p.set_defaults(func=_cmd_preprocess)

    def common(p):
        p.add_argument("--config", help="pipeline config JSON")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--no-diagnostics", action="store_true")

    p = sub.add_parser("segment", help="detect activity segments")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--plot-dir")
    p.add_argument("--eps-rel", dest="eps_rel", type=float)
    p.add_argument("--min-gap", dest="min_gap_s", type=float)
    p.add_argument("--min-len", dest="min_len_s", type=float)
    common(p)
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("train", help="fit detector and utensil model from labelled bundles")
    p.add_argument("--bundle", action="append", required=True,
                   help="TRACE:TRUTH pair; repeatable")
    p.add_argument("--detector-out")
    p.add_argument("--model-out")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--svm-lambda", type=float, default=1e-3)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("detect-eating", help="label segments as eating / non-eating")
    p.add_argument("--input", required=True)
    p.add_argument("--segments", required=True)
    p.add_argument("--detector", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_detect_eating)

    p = sub.add_parser("classify", help="classify eating segments by utensil")
    p.add_argument("--input", required=True)
    p.add_argument("--segments", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--all-segments", action="store_true",
                   help="also classify segments marked non-eating")
    common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("chew-count", help="count chews and swallows between eating segments")
    p.add_argument("--input", required=True)
    p.add_argument("--segments", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--beta", type=float, help="override minimum peak separation (s)")
    p.add_argument("--gamma", type=float, help="override minimum peak height")
    common(p)
    p.set_defaults(func=_cmd_chew_count)

    p = sub.add_parser("pipeline", help="run the full pipeline")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--detector")
    p.add_argument("--model")
    p.add_argument("--plot-dir")
    common(p)
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("metrics", help="score a result against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--confusion-csv")
    p.set_defaults(func=_cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        return int(code) if isinstance(code, int) else 0
    except EatmonError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
