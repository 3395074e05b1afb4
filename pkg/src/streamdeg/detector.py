"""Surrogate prediction-based anomaly scorers.

Scoring follows the standard prediction-error recipe: predict each frame
from its predecessors, measure PSNR between prediction and actual frame,
and min-max normalize 1 - PSNR into a per-video anomaly score in [0, 1]
(higher = more anomalous). Two trained-model-free predictors are
provided:

* ``prev``   — the previous frame verbatim (warmup 1 frame);
* ``linear`` — per-pixel linear extrapolation clip(2*p[i-1] - p[i-2], 0, 255)
  (warmup 2 frames).

PSNR is clamped at ``clamp_db`` so identical frames (MSE 0) still yield a
finite value the normalization can handle.

Score CSV format: header ``frame,psnr,score,label``, one row per frame.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexTooSmall,
    IoFailure,
    MalformedStream,
    MissingFile,
    TooShort,
    ValidationError,
)
from .frameio import Frame, VideoSequence

DEFAULT_CLAMP_DB = 80.0

PREDICTOR_PREV = "prev"
PREDICTOR_LINEAR = "linear"
WARMUP = {PREDICTOR_PREV: 1, PREDICTOR_LINEAR: 2}


def _pixels(frame) -> np.ndarray:
    return frame.pixels if isinstance(frame, Frame) else np.asarray(frame)


def psnr(a, b, clamp_db: float = DEFAULT_CLAMP_DB) -> float:
    """10*log10(255^2 / MSE) in dB, clamped to [0, clamp_db]; MSE 0 maps
    to the clamp. Accepts Frames or bare 2-D arrays of equal shape.
    """
    pa, pb = _pixels(a), _pixels(b)
    if pa.shape != pb.shape:
        raise DimensionMismatch(f"frame shapes differ: {pa.shape} vs {pb.shape}")
    diff = pa.astype(np.int64) - pb.astype(np.int64)
    sq_sum = int(np.sum(diff * diff))
    if sq_sum == 0:
        return float(clamp_db)
    mse = sq_sum / diff.size
    return min(10.0 * math.log10(255.0 ** 2 / mse), float(clamp_db))


def predict(video: VideoSequence, index: int, predictor: str = PREDICTOR_PREV) -> Frame:
    """Predict frame ``index`` from its predecessors."""
    if predictor not in WARMUP:
        raise ValidationError(f"unknown predictor {predictor!r}")
    if index < WARMUP[predictor]:
        raise IndexTooSmall(f"{predictor} needs index >= {WARMUP[predictor]}, got {index}")
    if predictor == PREDICTOR_PREV:
        return video.frames[index - 1].copy()
    p1 = video.frames[index - 1].pixels.astype(np.int32)
    p2 = video.frames[index - 2].pixels.astype(np.int32)
    return Frame(np.clip(2 * p1 - p2, 0, 255).astype(np.uint8))


@dataclass
class ScoreSeries:
    """Per-frame PSNR plus its min-max normalized anomaly score."""

    psnr: np.ndarray
    score: np.ndarray
    predictor_id: str
    clamp_db: float

    def __post_init__(self):
        self.psnr = np.asarray(self.psnr, dtype=np.float64)
        self.score = np.asarray(self.score, dtype=np.float64)
        if len(self.psnr) != len(self.score):
            raise ValidationError("psnr and score lengths differ")

    def __len__(self) -> int:
        return len(self.psnr)


def score_video(video: VideoSequence, predictor: str = PREDICTOR_PREV,
                clamp_db: float = DEFAULT_CLAMP_DB) -> ScoreSeries:
    """PSNR between predicted and actual frame for every frame past the
    warmup (warmup entries copy the first computed value), normalized to
    score = 1 - (psnr - min) / (max - min). A constant PSNR series maps
    to 0.5 everywhere.
    """
    if predictor not in WARMUP:
        raise ValidationError(f"unknown predictor {predictor!r}")
    warmup = WARMUP[predictor]
    n = len(video)
    if n < warmup + 1:
        raise TooShort(f"{predictor} needs at least {warmup + 1} frames, got {n}")
    values = np.empty(n, dtype=np.float64)
    for i in range(warmup, n):
        values[i] = psnr(predict(video, i, predictor), video.frames[i], clamp_db)
    values[:warmup] = values[warmup]
    lo, hi = values.min(), values.max()
    if hi == lo:
        scores = np.full(n, 0.5)
    else:
        scores = 1.0 - (values - lo) / (hi - lo)
    return ScoreSeries(values, scores, predictor, float(clamp_db))


# ---------------------------------------------------------------------------
# Score CSV
# ---------------------------------------------------------------------------

def write_scores_csv(series: ScoreSeries, labels: np.ndarray, path) -> None:
    if len(labels) != len(series):
        raise ValidationError(f"{len(labels)} labels for {len(series)} scores")
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frame", "psnr", "score", "label"])
            for i in range(len(series)):
                writer.writerow([i, float(series.psnr[i]), float(series.score[i]),
                                 int(labels[i])])
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def read_scores_csv(path) -> tuple[ScoreSeries, np.ndarray]:
    p = Path(path)
    if not p.is_file():
        raise MissingFile(str(p))
    psnr_vals, scores, labels = [], [], []
    try:
        with open(p, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["frame", "psnr", "score", "label"]:
                raise MalformedStream(f"{p}: unexpected scores header {header}")
            for row in reader:
                if len(row) != 4:
                    raise MalformedStream(f"{p}: bad scores row {row}")
                psnr_vals.append(float(row[1]))
                scores.append(float(row[2]))
                labels.append(int(row[3]))
    except OSError as e:
        raise IoFailure(f"cannot read {p}: {e}") from e
    except ValueError as e:
        raise MalformedStream(f"{p}: {e}") from None
    if not psnr_vals:
        raise MalformedStream(f"{p}: empty scores file")
    series = ScoreSeries(np.asarray(psnr_vals), np.asarray(scores),
                         "csv", float(np.max(psnr_vals)))
    return series, np.asarray(labels, dtype=np.uint8)
