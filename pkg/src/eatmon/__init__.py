"""eatmon: eating-activity monitoring from WiFi CSI amplitude streams.

Submodules:
    trace_io     CSV/binary trace formats and validation
    synth        synthetic trace generator with ground truth
    preprocess   outlier removal, band-pass filtering, moving statistics
    features     the shared 14-dimensional series feature vector
    segmentation spectrogram / CPSD / short-time-energy activity detection
    eating       eating vs non-eating segment discrimination
    utensils     eating-motion classification with soft-decision fusion
    chewing      minute-motion reconstruction, APSD, chew/swallow counting
    metrics      IoU matching, confusion matrices, evaluation reports
    pipeline     end-to-end orchestration and plot data emission
    cli          command line entry points
"""

__version__ = "0.1.0"

from .chewing import (
    ApsdSpectrum,
    ChewSwallowReport,
    ReconstructedSeries,
    apsd,
    count_chews_swallows,
    detect_peaks,
    estimate_chew_rate,
    reconstruct,
)
from .eating import EatingDetector, fit_detector, is_eating, segment_feature_vector
from .features import FEATURE_NAMES, series_features
from .metrics import EvalReport, evaluate, match_segments, percentage_error
from .pipeline import PipelineConfig, PipelineResult, emit_plot_data, run_pipeline
from .preprocess import (
    FilterSpec,
    bandpass,
    moving_average,
    moving_variance,
    remove_outliers,
)
from .segmentation import (
    ActivitySegment,
    cumulative_psd,
    segment_activities,
    short_time_energy,
    spectrogram,
)
from .synth import (
    ActivityEvent,
    GroundTruth,
    SynthScenario,
    generate,
    parse_scenario,
    validate_scenario,
)
from .trace_io import (
    CsiTrace,
    read_trace_bin,
    read_trace_csv,
    validate_trace,
    write_trace_bin,
    write_trace_csv,
)
from .utensils import (
    UTENSIL_CLASSES,
    UtensilDecision,
    UtensilModel,
    classify_segment,
    extract_features,
    soft_decision,
    subcarrier_probs,
    subcarrier_weights,
    train,
)

__all__ = [
    "ActivityEvent",
    "ActivitySegment",
    "ApsdSpectrum",
    "ChewSwallowReport",
    "CsiTrace",
    "EatingDetector",
    "EvalReport",
    "FEATURE_NAMES",
    "FilterSpec",
    "GroundTruth",
    "PipelineConfig",
    "PipelineResult",
    "ReconstructedSeries",
    "SynthScenario",
    "UTENSIL_CLASSES",
    "UtensilDecision",
    "UtensilModel",
    "apsd",
    "bandpass",
    "classify_segment",
    "count_chews_swallows",
    "cumulative_psd",
    "detect_peaks",
    "emit_plot_data",
    "estimate_chew_rate",
    "evaluate",
    "extract_features",
    "fit_detector",
    "generate",
    "is_eating",
    "match_segments",
    "moving_average",
    "moving_variance",
    "parse_scenario",
    "percentage_error",
    "read_trace_bin",
    "read_trace_csv",
    "reconstruct",
    "remove_outliers",
    "run_pipeline",
    "segment_activities",
    "segment_feature_vector",
    "series_features",
    "short_time_energy",
    "soft_decision",
    "spectrogram",
    "subcarrier_probs",
    "subcarrier_weights",
    "train",
    "validate_scenario",
    "validate_trace",
    "write_trace_bin",
    "write_trace_csv",
]
