"""streamdeg: stream-degradation attacks on video and their effect on
prediction-based anomaly detection.

The package generates adversarial video sequences that reproduce what a
bandwidth-limited or deauthentication-attacked camera link does to a
surveillance stream (slow motion, freezes, fast-forward catch-up, low
resolution, frame replication), either as scripted timeline transforms
(:mod:`streamdeg.effects`) or as emergent behavior of a simulated
camera-to-server link (:mod:`streamdeg.netsim`), and evaluates the impact
on PSNR-based anomaly scoring (:mod:`streamdeg.detector`,
:mod:`streamdeg.evaluate`).
"""

from .detector import (
    DEFAULT_CLAMP_DB,
    PREDICTOR_LINEAR,
    PREDICTOR_PREV,
    ScoreSeries,
    predict,
    psnr,
    read_scores_csv,
    score_video,
    write_scores_csv,
)
from .effects import (
    AttackSpec,
    DisplayTrace,
    apply_trace,
    build_combined_trace,
    build_extended_freeze_trace,
    build_lowres_trace,
    build_replicate_trace,
    build_sff_trace,
    build_trace,
    degrade_resolution,
    draw_onset,
    identity_trace,
    read_trace_csv,
    remap_labels,
    sff_segment_lengths,
    validate_trace,
    write_trace_csv,
)
from .errors import ToolkitError
from .evaluate import (
    FalseAlarms,
    MaskingVerdict,
    RocResult,
    compare_runs,
    effect_summary,
    false_alarms,
    format_comparison,
    masking_report,
    roc_auc,
    write_roc_csv,
)
from .frameio import (
    Frame,
    Manifest,
    VideoSequence,
    load_sequence,
    parse_pgm,
    parse_y4m,
    pgm_bytes,
    save_sequence,
    y4m_bytes,
)
from .netsim import (
    SimConfig,
    SimEventLog,
    load_sim_config,
    simulate,
    trace_to_effects_summary,
    write_event_log_csv,
)
from .synth import Anomaly, SynthConfig, generate

__version__ = "0.1.0"

__all__ = [
    "Anomaly", "AttackSpec", "DEFAULT_CLAMP_DB", "DisplayTrace", "FalseAlarms",
    "Frame", "Manifest", "MaskingVerdict", "PREDICTOR_LINEAR", "PREDICTOR_PREV",
    "RocResult", "ScoreSeries", "SimConfig", "SimEventLog", "SynthConfig",
    "ToolkitError", "VideoSequence", "apply_trace", "build_combined_trace",
    "build_extended_freeze_trace", "build_lowres_trace", "build_replicate_trace",
    "build_sff_trace", "build_trace", "compare_runs", "degrade_resolution",
    "draw_onset", "effect_summary", "false_alarms", "format_comparison",
    "generate", "identity_trace", "load_sequence", "load_sim_config",
    "masking_report", "parse_pgm", "parse_y4m", "pgm_bytes", "predict", "psnr",
    "read_scores_csv", "read_trace_csv", "remap_labels", "roc_auc",
    "save_sequence", "score_video", "sff_segment_lengths", "simulate",
    "trace_to_effects_summary", "validate_trace", "write_event_log_csv",
    "write_roc_csv", "write_scores_csv", "write_trace_csv", "y4m_bytes",
]
