"""Attack timeline construction and rendering.

A :class:`DisplayTrace` is the canonical description of a stream attack:
for every output tick it records which source frame is shown
(``src_index``), at what effective resolution (``res_factor``, 1 = full),
and under which effect tag. All builders preserve sequence length, keep
``src_index`` non-decreasing, and leave every tick outside the attack
span at identity (src = tick, full resolution, tag "clean").

Slow-freeze-fast timelines split a duration ``d`` into segment lengths
round(d/3), round(d/6) and the remainder (rounding half up), slow down by
an integer duplication factor ``f``, hold the last slow frame through the
freeze, and then resample the accumulated backlog over the fast segment
with a ceiling accumulator so that the tick right after the attack is
back at identity — the stream has caught up with the live frame.

Trace CSV format: header ``tick,src_index,resolution,tag``, one row per
tick; ``resolution`` is the integer factor (1 = full).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    AnomalyTooLong,
    InvalidK,
    IoFailure,
    LengthMismatch,
    MalformedStream,
    MissingFile,
    NoAnomaly,
    SpanOutOfRange,
    TraceMismatch,
    ValidationError,
)
from .frameio import Frame, VideoSequence
from .rng import Xorshift64Star

TAG_CLEAN = "clean"
TAG_SLOW = "slow"
TAG_FREEZE = "freeze"
TAG_FAST = "fast"
TAG_LOWRES = "lowres"
TAG_REPLICATED = "replicated"

ALL_TAGS = (TAG_CLEAN, TAG_SLOW, TAG_FREEZE, TAG_FAST, TAG_LOWRES, TAG_REPLICATED)

LABELS_REALTIME = "realtime"
LABELS_DISPLAYED = "displayed"

KIND_SFF = "sff"
KIND_LOWRES = "lowres"
KIND_COMBINED = "combined"
KIND_REPLICATE = "replicate"
KIND_EXTFREEZE = "extfreeze"


@dataclass(eq=False)
class DisplayTrace:
    src_index: np.ndarray   # int64, source frame shown at each output tick
    res_factor: np.ndarray  # int64, 1 = full resolution
    tag: np.ndarray         # unicode effect tag per tick

    def __post_init__(self):
        self.src_index = np.asarray(self.src_index, dtype=np.int64)
        self.res_factor = np.asarray(self.res_factor, dtype=np.int64)
        self.tag = np.asarray(self.tag, dtype="U10")
        if not (len(self.src_index) == len(self.res_factor) == len(self.tag)):
            raise LengthMismatch("trace columns differ in length")

    def __len__(self) -> int:
        return len(self.src_index)

    def equals(self, other: "DisplayTrace") -> bool:
        return (np.array_equal(self.src_index, other.src_index)
                and np.array_equal(self.res_factor, other.res_factor)
                and np.array_equal(self.tag, other.tag))


def identity_trace(n: int) -> DisplayTrace:
    return DisplayTrace(np.arange(n, dtype=np.int64),
                        np.ones(n, dtype=np.int64),
                        np.full(n, TAG_CLEAN, dtype="U10"))


def validate_trace(trace: DisplayTrace, n: int | None = None) -> None:
    """Check the structural invariants every attack trace must satisfy."""
    n = len(trace) if n is None else n
    if len(trace) != n:
        raise TraceMismatch(f"trace has {len(trace)} ticks, expected {n}")
    src = trace.src_index
    if len(src) and (src.min() < 0 or src.max() >= n):
        raise TraceMismatch("src_index out of range")
    if np.any(np.diff(src) < 0):
        raise TraceMismatch("src_index must be non-decreasing")
    if np.any(trace.res_factor < 1):
        raise TraceMismatch("res_factor must be >= 1")
    for t in np.unique(trace.tag):
        if t not in ALL_TAGS:
            raise TraceMismatch(f"unknown tag {t!r}")


def _round_half_up_div(a: int, b: int) -> int:
    """round(a / b) with halves rounding up, in exact integer arithmetic."""
    return (2 * a + b) // (2 * b)


def sff_segment_lengths(duration: int) -> tuple[int, int, int]:
    """Slow/freeze/fast lengths: round(d/3), round(d/6), remainder."""
    l_slow = _round_half_up_div(duration, 3)
    l_freeze = _round_half_up_div(duration, 6)
    return l_slow, l_freeze, duration - l_slow - l_freeze


def _check_span(n: int, t: int, d: int) -> None:
    if d < 0 or t < 0 or t + d > n:
        raise SpanOutOfRange(f"attack span [{t}, {t + d}) outside video of {n} frames")


def _fill_slow_freeze_fast(trace: DisplayTrace, t: int, l_slow: int, l_freeze: int,
                           l_fast: int, f: int) -> None:
    """Write the three segments into an identity trace starting at tick t.

    Slow shows source t + floor(j/f) at tick t+j and consumes
    c = ceil(l_slow/f) sources; freeze repeats the last slow source; fast
    distributes the backlog b = total - c so that its final tick shows the
    last pre-resync source and tick t + total is back at identity.
    """
    src = trace.src_index
    tags = trace.tag
    total = l_slow + l_freeze + l_fast

    j = np.arange(l_slow, dtype=np.int64)
    src[t:t + l_slow] = t + j // f
    tags[t:t + l_slow] = TAG_SLOW

    consumed = -(-l_slow // f)
    # unreachable for the d/3-d/6 split (l_freeze > 0 implies l_slow > 0),
    # but keeps the helper total for arbitrary segment tuples
    last_slow_src = t + consumed - 1 if l_slow > 0 else max(t - 1, 0)
    src[t + l_slow:t + l_slow + l_freeze] = last_slow_src
    tags[t + l_slow:t + l_slow + l_freeze] = TAG_FREEZE

    if l_fast > 0:
        backlog = total - consumed
        j = np.arange(1, l_fast + 1, dtype=np.int64)
        src[t + l_slow + l_freeze:t + total] = \
            t + consumed + (j * backlog + l_fast - 1) // l_fast - 1
        tags[t + l_slow + l_freeze:t + total] = TAG_FAST


def build_sff_trace(n: int, t: int, d: int, f: int = 2) -> DisplayTrace:
    """Slow for round(d/3) ticks, freeze for round(d/6), fast-forward for
    the rest; identity (resynchronized) from tick t+d on.
    """
    _check_span(n, t, d)
    if f < 1:
        raise ValidationError(f"slow factor must be >= 1, got {f}")
    trace = identity_trace(n)
    if d == 0:
        return trace
    l_slow, l_freeze, l_fast = sff_segment_lengths(d)
    _fill_slow_freeze_fast(trace, t, l_slow, l_freeze, l_fast, f)
    return trace


def build_lowres_trace(n: int, t: int, d: int, r: int = 4) -> DisplayTrace:
    """Identity timeline with resolution factor r over [t, t+d)."""
    _check_span(n, t, d)
    if r < 1:
        raise ValidationError(f"resolution factor must be >= 1, got {r}")
    trace = identity_trace(n)
    trace.res_factor[t:t + d] = r  # r == 1 stays normalized to full
    trace.tag[t:t + d] = TAG_LOWRES
    return trace


def build_combined_trace(n: int, t: int, d: int, f: int = 2, r: int = 4) -> DisplayTrace:
    """Slow-freeze-fast timeline with low resolution across the whole span."""
    if r < 1:
        raise ValidationError(f"resolution factor must be >= 1, got {r}")
    trace = build_sff_trace(n, t, d, f)
    if r > 1:
        trace.res_factor[t:t + d] = r
    return trace


def build_replicate_trace(n: int, k: int, period: int = 10) -> DisplayTrace:
    """Duplicate the frame at position period-k-1 over the last k ticks of
    every period-length block. A partial final block is treated the same
    when it still contains at least period-k ticks, else left at identity.
    """
    if period < 2:
        raise InvalidK(f"period must be >= 2, got {period}")
    if not (0 <= k < period):
        raise InvalidK(f"k must lie in [0, period), got k={k} period={period}")
    trace = identity_trace(n)
    for start in range(0, n, period):
        block_len = min(period, n - start)
        if block_len < period - k:
            break
        lo, hi = start + period - k, min(start + period, n)
        trace.src_index[lo:hi] = start + period - k - 1
        trace.tag[lo:hi] = TAG_REPLICATED
    return trace


def build_extended_freeze_trace(n: int, anomaly_span: tuple[int, int], s: int,
                                f: int = 2) -> DisplayTrace:
    """Freeze stretched to cover an anomaly: slow for s ticks ending right
    at the anomaly onset, freeze for 3s ticks, fast for 2s.
    """
    a0, a1 = anomaly_span
    if not (0 <= a0 < a1 <= n):
        raise SpanOutOfRange(f"anomaly span [{a0}, {a1}) outside video of {n} frames")
    if s < 1 or f < 1:
        raise ValidationError(f"need s >= 1 and f >= 1, got s={s} f={f}")
    if 3 * s < a1 - a0:
        raise AnomalyTooLong(
            f"freeze of {3 * s} ticks cannot cover a {a1 - a0}-tick anomaly")
    t = a0 - s
    if t < 0 or t + 6 * s > n:
        raise SpanOutOfRange(f"attack span [{t}, {t + 6 * s}) outside video of {n} frames")
    trace = identity_trace(n)
    _fill_slow_freeze_fast(trace, t, s, 3 * s, 2 * s, f)
    return trace


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def degrade_resolution(frame: Frame, r: int) -> Frame:
    """Replace every r x r block (edge blocks smaller) by its mean, rounded
    half away from zero; dimensions are unchanged. r = 1 is the identity.
    """
    if r < 1:
        raise ValidationError(f"resolution factor must be >= 1, got {r}")
    if r == 1:
        return frame.copy()
    px = frame.pixels.astype(np.int64)
    h, w = px.shape
    row_starts = np.arange(0, h, r)
    col_starts = np.arange(0, w, r)
    sums = np.add.reduceat(np.add.reduceat(px, row_starts, axis=0), col_starts, axis=1)
    row_counts = np.diff(np.append(row_starts, h))
    col_counts = np.diff(np.append(col_starts, w))
    counts = np.outer(row_counts, col_counts)
    means = (2 * sums + counts) // (2 * counts)  # half away from zero (values >= 0)
    out = np.repeat(np.repeat(means, row_counts, axis=0), col_counts, axis=1)
    return Frame(out.astype(np.uint8), res_factor=r)


def remap_labels(labels: np.ndarray, trace: DisplayTrace,
                 mode: str = LABELS_REALTIME) -> np.ndarray:
    """Realtime keeps tick i's original label (all traces preserve length
    and resynchronize); displayed takes the label of the frame shown.
    """
    labels = np.asarray(labels)
    if len(labels) != len(trace):
        raise LengthMismatch(f"{len(labels)} labels for a {len(trace)}-tick trace")
    if mode == LABELS_REALTIME:
        return labels.copy()
    if mode == LABELS_DISPLAYED:
        return labels[trace.src_index].copy()
    raise ValidationError(f"unknown label mode {mode!r}")


def apply_trace(video: VideoSequence, trace: DisplayTrace,
                label_mode: str = LABELS_REALTIME) -> VideoSequence:
    """Render a trace against a source sequence. Pure per tick: output
    frame i is a byte-copy of source[src_index[i]], box-degraded when the
    tick carries a resolution factor > 1.
    """
    if len(trace) != len(video):
        raise TraceMismatch(f"trace has {len(trace)} ticks for {len(video)} frames")
    src = trace.src_index
    if len(src) and (src.min() < 0 or src.max() >= len(video)):
        raise TraceMismatch("src_index out of range for this video")
    cache: dict[tuple[int, int], Frame] = {}
    frames = []
    for i in range(len(trace)):
        key = (int(src[i]), int(trace.res_factor[i]))
        if key not in cache:
            source = video.frames[key[0]]
            cache[key] = degrade_resolution(source, key[1]) if key[1] > 1 else source.copy()
        frames.append(cache[key].copy())
    return VideoSequence(video.fps, frames, remap_labels(video.labels, trace, label_mode))


# ---------------------------------------------------------------------------
# Attack specs and random onset
# ---------------------------------------------------------------------------

def draw_onset(seed: int, n: int, duration: int) -> int:
    """Uniform onset in [0, n - duration], reproducible from the seed."""
    if duration > n:
        raise SpanOutOfRange(f"duration {duration} exceeds video length {n}")
    u = Xorshift64Star(seed).unit()
    return min(int(u * (n - duration + 1)), n - duration)


@dataclass
class AttackSpec:
    """Which attack to build, with its parameters.

    ``onset`` may be None, in which case it is drawn uniformly from the
    feasible range using ``seed`` (and reported back by build_trace).
    """

    kind: str
    onset: int | None = None
    duration: int = 0
    slow_factor: int = 2
    lowres_factor: int = 4
    k: int = 1
    period: int = 10
    slow_len: int | None = None
    seed: int = 0


def build_trace(spec: AttackSpec, n: int, labels: np.ndarray | None = None
                ) -> tuple[DisplayTrace, int | None]:
    """Dispatch an AttackSpec to its builder; returns (trace, resolved onset).

    extfreeze derives its anomaly span from the first run of 1-labels and
    its onset from the span, so ``labels`` is required for that kind.
    """
    if spec.kind == KIND_REPLICATE:
        return build_replicate_trace(n, spec.k, spec.period), None
    if spec.kind == KIND_EXTFREEZE:
        if labels is None or not np.any(np.asarray(labels) == 1):
            raise NoAnomaly("extfreeze needs a labeled anomaly in the input")
        ones = np.flatnonzero(np.asarray(labels) == 1)
        a0 = int(ones[0])
        a1 = a0 + 1
        while a1 < n and labels[a1] == 1:
            a1 += 1
        s = spec.slow_len if spec.slow_len is not None else -(-(a1 - a0) // 3)
        return build_extended_freeze_trace(n, (a0, a1), s, spec.slow_factor), a0 - s
    onset = spec.onset if spec.onset is not None else draw_onset(spec.seed, n, spec.duration)
    if spec.kind == KIND_SFF:
        return build_sff_trace(n, onset, spec.duration, spec.slow_factor), onset
    if spec.kind == KIND_LOWRES:
        return build_lowres_trace(n, onset, spec.duration, spec.lowres_factor), onset
    if spec.kind == KIND_COMBINED:
        return build_combined_trace(n, onset, spec.duration, spec.slow_factor,
                                    spec.lowres_factor), onset
    raise ValidationError(f"unknown attack kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# Trace CSV
# ---------------------------------------------------------------------------

def write_trace_csv(trace: DisplayTrace, path) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tick", "src_index", "resolution", "tag"])
            for i in range(len(trace)):
                writer.writerow([i, int(trace.src_index[i]),
                                 int(trace.res_factor[i]), str(trace.tag[i])])
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def read_trace_csv(path) -> DisplayTrace:
    p = Path(path)
    if not p.is_file():
        raise MissingFile(str(p))
    src, res, tags = [], [], []
    try:
        with open(p, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["tick", "src_index", "resolution", "tag"]:
                raise MalformedStream(f"{p}: unexpected trace header {header}")
            for row in reader:
                if len(row) != 4:
                    raise MalformedStream(f"{p}: bad trace row {row}")
                src.append(int(row[1]))
                res.append(int(row[2]))
                tags.append(row[3])
    except OSError as e:
        raise IoFailure(f"cannot read {p}: {e}") from e
    except ValueError as e:
        raise MalformedStream(f"{p}: {e}") from None
    return DisplayTrace(np.asarray(src, dtype=np.int64),
                        np.asarray(res, dtype=np.int64),
                        np.asarray(tags, dtype="U10"))
