"""Seeded synthetic surveillance clips with ground-truth anomalies.

A clip is a static textured-noise background with one bright square
patrolling it at constant velocity (toroidal wrap). The anomaly is a
motion-statistics change, because prediction-based detectors key on
motion: either the square speeds up ("fast") or a second square appears
and moves ("appearance"). Labels are 1 exactly on the anomaly span.

All pixel math is integer-only and every random draw comes from the
pinned generator in :mod:`streamdeg.rng`, so the same config reproduces
the same bytes on any platform. Draw order: background texture
(row-major, only when background_noise_amp > 0), then the main square's
start position (x, then y), then — only for an "appearance" anomaly —
the second square's start position (x, then y).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidConfig
from .frameio import Frame, VideoSequence
from .rng import Xorshift64Star

_BG_BASE = 96       # mean background luma
_OBJECT_LUMA = 255
_SECOND_LUMA = 208

ANOMALY_FAST = "fast"
ANOMALY_APPEARANCE = "appearance"


@dataclass(frozen=True)
class Anomaly:
    start: int
    length: int
    kind: str = ANOMALY_FAST
    velocity: int = 5  # only used by the "fast" kind


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    n_frames: int
    width: int = 64
    height: int = 64
    fps: int = 30
    background_noise_amp: int = 20
    object_size: int = 8
    normal_velocity: int = 1
    anomaly: Anomaly | None = None


def _validate(cfg: SynthConfig) -> None:
    if cfg.n_frames < 2:
        raise InvalidConfig(f"n_frames must be >= 2, got {cfg.n_frames}")
    if cfg.width < 1 or cfg.height < 1:
        raise InvalidConfig(f"bad dimensions {cfg.width}x{cfg.height}")
    if cfg.fps <= 0:
        raise InvalidConfig(f"fps must be positive, got {cfg.fps}")
    if not (0 <= cfg.background_noise_amp <= _BG_BASE):
        raise InvalidConfig(
            f"background_noise_amp must lie in [0, {_BG_BASE}], got {cfg.background_noise_amp}")
    if not (1 <= cfg.object_size <= min(cfg.width, cfg.height)):
        raise InvalidConfig(f"object_size {cfg.object_size} does not fit the frame")
    if cfg.normal_velocity < 1:
        raise InvalidConfig(f"normal_velocity must be >= 1, got {cfg.normal_velocity}")
    a = cfg.anomaly
    if a is None:
        return
    if a.kind not in (ANOMALY_FAST, ANOMALY_APPEARANCE):
        raise InvalidConfig(f"unknown anomaly kind {a.kind!r}")
    if a.length < 1 or a.start < 0 or a.start + a.length > cfg.n_frames:
        raise InvalidConfig(
            f"anomaly span [{a.start}, {a.start + a.length}) outside [0, {cfg.n_frames})")
    if a.kind == ANOMALY_FAST and a.velocity <= cfg.normal_velocity:
        raise InvalidConfig(
            f"fast anomaly velocity {a.velocity} must exceed normal {cfg.normal_velocity}")


def _paint_square(pixels: np.ndarray, x: int, y: int, size: int, value: int) -> None:
    h, w = pixels.shape
    rows = np.arange(y, y + size) % h
    cols = np.arange(x, x + size) % w
    pixels[np.ix_(rows, cols)] = value


def generate(config: SynthConfig) -> VideoSequence:
    """Render the configured clip. Deterministic in ``config``."""
    _validate(config)
    cfg = config
    rng = Xorshift64Star(cfg.seed)

    background = np.full((cfg.height, cfg.width), _BG_BASE, dtype=np.uint8)
    amp = cfg.background_noise_amp
    if amp > 0:
        flat = background.reshape(-1)
        span = 2 * amp + 1
        for i in range(flat.size):
            flat[i] = _BG_BASE + rng.next_below(span) - amp

    x = rng.next_below(cfg.width)
    y = rng.next_below(cfg.height)

    a = cfg.anomaly
    if a is not None and a.kind == ANOMALY_APPEARANCE:
        x2 = rng.next_below(cfg.width)
        y2 = rng.next_below(cfg.height)

    labels = np.zeros(cfg.n_frames, dtype=np.uint8)
    if a is not None:
        labels[a.start:a.start + a.length] = 1

    frames: list[Frame] = []
    for i in range(cfg.n_frames):
        in_anomaly = a is not None and a.start <= i < a.start + a.length
        if i > 0:
            v = cfg.normal_velocity
            if in_anomaly and a.kind == ANOMALY_FAST:
                v = a.velocity
            x = (x + v) % cfg.width
        pixels = background.copy()
        _paint_square(pixels, x, y, cfg.object_size, _OBJECT_LUMA)
        if in_anomaly and a.kind == ANOMALY_APPEARANCE:
            step = (i - a.start) * cfg.normal_velocity
            _paint_square(pixels, (x2 - step) % cfg.width, y2, cfg.object_size, _SECOND_LUMA)
        frames.append(Frame(pixels))

    return VideoSequence(Fraction(cfg.fps), frames, labels)
