"""Frame-level evaluation: ROC/AUC, false alarms, per-effect PSNR
summaries, anomaly-masking verdicts, and run comparison reports.

AUC uses the full threshold sweep with tied scores grouped, which makes
the trapezoidal curve integral equal the Mann-Whitney statistic with 0.5
credit per tie. The integral is accumulated in exact integer arithmetic
(pair counts) and divided once at the end, so it matches brute-force pair
counting bit for bit.

Micro aggregation concatenates all videos before the sweep; macro
averages per-video AUCs (a macro result carries no single ROC curve, so
its ``points`` array is empty).
"""

from __future__ import annotations

import csv
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from .detector import ScoreSeries
from .effects import TAG_CLEAN, DisplayTrace
from .errors import (
    DegenerateLabels,
    IoFailure,
    LengthMismatch,
    NoAnomaly,
    ValidationError,
)

AGG_MICRO = "micro"
AGG_MACRO = "macro"

FalseAlarms = namedtuple("FalseAlarms", ["frame_count", "event_count"])


@dataclass
class RocResult:
    auc: float
    points: np.ndarray      # (m, 2) of (fpr, tpr), sorted by descending threshold
    thresholds: np.ndarray  # (m,) threshold per point; +inf for the (0, 0) point
    n_pos: int
    n_neg: int


@dataclass
class MaskingVerdict:
    anomaly_span: tuple[int, int]
    max_score_in_span: float
    threshold: float
    masked: bool


def _scores_of(series_or_scores) -> np.ndarray:
    if isinstance(series_or_scores, ScoreSeries):
        return series_or_scores.score
    return np.asarray(series_or_scores, dtype=np.float64)


def _binary_roc(scores: np.ndarray, labels: np.ndarray) -> RocResult:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores for {len(labels)} labels")
    n_pos = int(np.sum(labels == 1))
    n_neg = int(len(labels) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels(f"need both classes, got {n_pos} pos / {n_neg} neg")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    l = (labels[order] == 1).astype(np.int64)
    # indices where a tie group ends
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    cum_tp = np.cumsum(l)[ends]
    cum_fp = (ends + 1) - cum_tp
    d_tp = np.diff(np.r_[0, cum_tp])
    d_fp = np.diff(np.r_[0, cum_fp])
    # trapezoid in pair units: each group adds d_fp * (2*tp_before + d_tp)
    numerator = int(np.sum(d_fp * (2 * (cum_tp - d_tp) + d_tp)))
    auc = numerator / (2 * n_pos * n_neg)

    points = np.empty((len(ends) + 1, 2), dtype=np.float64)
    points[0] = (0.0, 0.0)
    points[1:, 0] = cum_fp / n_neg
    points[1:, 1] = cum_tp / n_pos
    thresholds = np.r_[np.inf, s[ends]]
    return RocResult(auc, points, thresholds, n_pos, n_neg)


def _is_multi(scores) -> bool:
    if isinstance(scores, np.ndarray):
        return False
    return (isinstance(scores, (list, tuple)) and len(scores) > 0
            and np.ndim(scores[0]) == 1)


def roc_auc(scores, labels, aggregation: str = AGG_MICRO) -> RocResult:
    """Frame-level ROC/AUC; ``scores``/``labels`` may be single arrays or
    per-video lists of arrays (micro concatenates, macro averages).
    """
    if aggregation not in (AGG_MICRO, AGG_MACRO):
        raise ValidationError(f"unknown aggregation {aggregation!r}")
    if not _is_multi(scores):
        scores, labels = [scores], [labels]
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} score arrays for {len(labels)} label arrays")
    if aggregation == AGG_MICRO:
        return _binary_roc(np.concatenate([np.asarray(s, dtype=np.float64) for s in scores]),
                           np.concatenate([np.asarray(l) for l in labels]))
    per_video = [_binary_roc(s, l) for s, l in zip(scores, labels)]
    auc = float(np.mean([r.auc for r in per_video]))
    return RocResult(auc, np.empty((0, 2)), np.empty(0),
                     sum(r.n_pos for r in per_video), sum(r.n_neg for r in per_video))


def false_alarms(series_or_scores, labels, tau: float) -> FalseAlarms:
    """Frames with score >= tau on label-0 ticks, plus the number of
    maximal runs of such frames.
    """
    scores = _scores_of(series_or_scores)
    labels = np.asarray(labels)
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores for {len(labels)} labels")
    if not (0.0 <= tau <= 1.0):
        raise ValidationError(f"tau must lie in [0, 1], got {tau}")
    mask = (scores >= tau) & (labels == 0)
    frame_count = int(np.sum(mask))
    event_count = int(np.sum(mask & ~np.r_[False, mask[:-1]]))
    return FalseAlarms(frame_count, event_count)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    spans = []
    start = None
    for i, v in enumerate(mask):
        if v and start is None:
            start = i
        elif not v and start is not None:
            spans.append((start, i))
            start = None
    if start is not None:
        spans.append((start, len(mask)))
    return spans


def effect_summary(series: ScoreSeries, trace: DisplayTrace) -> list[dict]:
    """PSNR statistics per maximal effect-tag run, plus one baseline row
    aggregating every clean tick. Variances are population variances.
    """
    if len(series) != len(trace):
        raise LengthMismatch(f"{len(series)} scores for a {len(trace)}-tick trace")
    ps = series.psnr
    rows = []
    start = 0
    tags = trace.tag
    for i in range(1, len(tags) + 1):
        if i == len(tags) or tags[i] != tags[start]:
            if tags[start] != TAG_CLEAN:
                seg = ps[start:i]
                rows.append({
                    "tag": str(tags[start]), "start": start, "end": i, "ticks": i - start,
                    "mean_psnr": float(np.mean(seg)),
                    "var_psnr": float(np.var(seg)),
                    "min_psnr": float(np.min(seg)),
                })
            start = i
    clean = ps[tags == TAG_CLEAN]
    if len(clean):
        rows.append({
            "tag": TAG_CLEAN, "start": None, "end": None, "ticks": int(len(clean)),
            "mean_psnr": float(np.mean(clean)),
            "var_psnr": float(np.var(clean)),
            "min_psnr": float(np.min(clean)),
        })
    return rows


def masking_report(series_or_scores, realtime_labels, tau: float) -> list[MaskingVerdict]:
    """One verdict per anomaly run: masked when no score inside the run
    reaches the alarm threshold.
    """
    scores = _scores_of(series_or_scores)
    labels = np.asarray(realtime_labels)
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores for {len(labels)} labels")
    spans = _runs(labels == 1)
    if not spans:
        raise NoAnomaly("labels contain no anomaly run")
    verdicts = []
    for a0, a1 in spans:
        peak = float(np.max(scores[a0:a1]))
        verdicts.append(MaskingVerdict((a0, a1), peak, float(tau), peak < tau))
    return verdicts


def compare_runs(runs: list[tuple[str, RocResult]]) -> dict:
    """AUC table with deltas against the first (baseline) run."""
    if len(runs) < 2:
        raise ValidationError(f"need at least 2 runs to compare, got {len(runs)}")
    base = runs[0][1].auc
    return {
        "baseline": runs[0][0],
        "runs": [
            {"name": name, "auc": r.auc, "n_pos": r.n_pos, "n_neg": r.n_neg,
             "delta": r.auc - base}
            for name, r in runs
        ],
    }


def format_comparison(report: dict) -> str:
    width = max(len(r["name"]) for r in report["runs"])
    lines = [f"{'run':<{width}}  {'auc':>8}  {'delta':>8}"]
    for r in report["runs"]:
        lines.append(f"{r['name']:<{width}}  {r['auc']:8.4f}  {r['delta']:+8.4f}")
    return "\n".join(lines)


def write_roc_csv(roc: RocResult, path) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["threshold", "fpr", "tpr"])
            for i in range(len(roc.points)):
                writer.writerow([float(roc.thresholds[i]),
                                 float(roc.points[i, 0]), float(roc.points[i, 1])])
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
