"""Fixed-timestep camera-to-display network simulation.

One tick = one display interval (1/fps seconds). Per tick the loop runs
three stages:

1. The camera captures a frame and enqueues it in its send buffer,
   choosing full or reduced resolution from a backlog hysteresis rule
   (switch to low above ``adapt_threshold`` frames of backlog, back to
   full at or below half the threshold), subject to buffer capacity and
   drop policy. Dropping the oldest frame discards any partial transfer
   progress on it.
2. If the link is up, the tick's byte budget (bandwidth/fps) goes toward
   the head-of-queue frame; every fully transferred frame moves to the
   receiver's arrival queue. Deauthentication spans grant zero bytes;
   buffered frames survive the outage.
3. The receiver pops at most ``fast_playout_cap`` arrived frames and
   displays the last one popped, or re-displays the previous frame when
   nothing arrived.

Display tags: "freeze" when nothing was popped during or right after a
link outage that has not yet delivered a frame; "fast" when more than one
frame was popped; "clean"/"lowres" when the display shows the live frame
(by the displayed frame's resolution); "slow" otherwise (the display is
lagging the camera).

Byte accounting is exact: progress is tracked in units of bytes*fps, so a
frame of B bytes costs B*fps units and each tick grants bandwidth(tick)
units. No floats enter the simulation state.

SimConfig JSON field names: fps, frame_bytes_full, lowres_divisor,
bandwidth_schedule ([{"from_tick", "bytes_per_sec"}]), deauth_events
([{"start_tick", "duration_ticks"}]), buffer_capacity (frames; null for
unbounded), drop_policy ("drop_oldest" | "drop_newest"), adapt_threshold
(frames; null disables adaptation), fast_playout_cap.

Event log CSV: ``tick,link_up,bytes_granted,backlog,cam_res,src,tag``
where backlog is the send-buffer depth at end of tick and cam_res the
factor chosen for the frame captured that tick.
"""

from __future__ import annotations

import csv
import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .effects import (
    TAG_CLEAN,
    TAG_FAST,
    TAG_FREEZE,
    TAG_LOWRES,
    TAG_SLOW,
    DisplayTrace,
)
from .errors import InvalidConfig, IoFailure, MalformedManifest, MissingFile

DROP_OLDEST = "drop_oldest"
DROP_NEWEST = "drop_newest"


@dataclass
class SimConfig:
    fps: int
    frame_bytes_full: int
    lowres_divisor: int = 2
    bandwidth_schedule: list[tuple[int, int]] = field(default_factory=list)
    deauth_events: list[tuple[int, int]] = field(default_factory=list)
    buffer_capacity: int | None = None  # None = 10 seconds of frames; see from_dict
    drop_policy: str = DROP_OLDEST
    adapt_threshold: float | None = None  # None disables resolution adaptation
    fast_playout_cap: int = 2

    def __post_init__(self):
        if self.buffer_capacity is None:
            self.buffer_capacity = 10 * self.fps
        _validate(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        if not isinstance(d, dict):
            raise InvalidConfig("sim config must be a JSON object")
        try:
            schedule = [(int(e["from_tick"]), int(e["bytes_per_sec"]))
                        for e in d.get("bandwidth_schedule", [])]
            events = [(int(e["start_tick"]), int(e["duration_ticks"]))
                      for e in d.get("deauth_events", [])]
            capacity = d.get("buffer_capacity", 10 * int(d["fps"]))
            if capacity is not None:
                capacity = int(capacity)
            threshold = d.get("adapt_threshold")
            if threshold is not None:
                threshold = float(threshold)
            cfg = cls(
                fps=int(d["fps"]),
                frame_bytes_full=int(d["frame_bytes_full"]),
                lowres_divisor=int(d.get("lowres_divisor", 2)),
                bandwidth_schedule=schedule,
                deauth_events=events,
                buffer_capacity=math.inf if capacity is None else capacity,
                drop_policy=d.get("drop_policy", DROP_OLDEST),
                adapt_threshold=threshold,
                fast_playout_cap=int(d.get("fast_playout_cap", 2)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidConfig(f"bad sim config: {e}") from None
        return cfg

    def to_dict(self) -> dict:
        cap = self.buffer_capacity
        return {
            "fps": self.fps,
            "frame_bytes_full": self.frame_bytes_full,
            "lowres_divisor": self.lowres_divisor,
            "bandwidth_schedule": [
                {"from_tick": t, "bytes_per_sec": b} for t, b in self.bandwidth_schedule],
            "deauth_events": [
                {"start_tick": s, "duration_ticks": d} for s, d in self.deauth_events],
            "buffer_capacity": None if cap == math.inf else int(cap),
            "drop_policy": self.drop_policy,
            "adapt_threshold": self.adapt_threshold,
            "fast_playout_cap": self.fast_playout_cap,
        }


def _validate(cfg: SimConfig) -> None:
    if cfg.fps < 1:
        raise InvalidConfig(f"fps must be a positive integer, got {cfg.fps}")
    if cfg.frame_bytes_full < 1:
        raise InvalidConfig(f"frame_bytes_full must be positive, got {cfg.frame_bytes_full}")
    if cfg.lowres_divisor < 1:
        raise InvalidConfig(f"lowres_divisor must be >= 1, got {cfg.lowres_divisor}")
    if cfg.fast_playout_cap < 1:
        raise InvalidConfig(f"fast_playout_cap must be >= 1, got {cfg.fast_playout_cap}")
    if cfg.buffer_capacity != math.inf and int(cfg.buffer_capacity) < 1:
        raise InvalidConfig(f"buffer_capacity must be >= 1, got {cfg.buffer_capacity}")
    if cfg.drop_policy not in (DROP_OLDEST, DROP_NEWEST):
        raise InvalidConfig(f"unknown drop policy {cfg.drop_policy!r}")
    if cfg.adapt_threshold is not None and cfg.adapt_threshold <= 0:
        raise InvalidConfig(f"adapt_threshold must be positive, got {cfg.adapt_threshold}")
    if not cfg.bandwidth_schedule:
        raise InvalidConfig("bandwidth_schedule must not be empty")
    ticks = [t for t, _ in cfg.bandwidth_schedule]
    if ticks[0] != 0:
        raise InvalidConfig("bandwidth_schedule must start at tick 0")
    if any(b < a for a, b in zip(ticks, ticks[1:])) or len(set(ticks)) != len(ticks):
        raise InvalidConfig("bandwidth_schedule from_tick values must strictly increase")
    if any(b < 0 for _, b in cfg.bandwidth_schedule):
        raise InvalidConfig("bandwidth must be non-negative")
    for s, d in cfg.deauth_events:
        if s < 0 or d < 0:
            raise InvalidConfig(f"bad deauth event ({s}, {d})")


def load_sim_config(path) -> SimConfig:
    p = Path(path)
    if not p.is_file():
        raise MissingFile(str(p))
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except OSError as e:
        raise IoFailure(f"cannot read {p}: {e}") from e
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise InvalidConfig(f"{p}: {e}") from None
    return SimConfig.from_dict(doc)


@dataclass
class SimEventLog:
    tick: np.ndarray
    link_up: np.ndarray
    bytes_granted: np.ndarray
    backlog_frames: np.ndarray
    camera_resolution: np.ndarray
    displayed_src: np.ndarray
    display_tag: np.ndarray

    def __len__(self) -> int:
        return len(self.tick)


def write_event_log_csv(log: SimEventLog, path) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tick", "link_up", "bytes_granted", "backlog",
                             "cam_res", "src", "tag"])
            for i in range(len(log)):
                writer.writerow([int(log.tick[i]), int(log.link_up[i]),
                                 float(log.bytes_granted[i]), int(log.backlog_frames[i]),
                                 int(log.camera_resolution[i]), int(log.displayed_src[i]),
                                 str(log.display_tag[i])])
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def _per_tick_bandwidth(schedule: list[tuple[int, int]], n_ticks: int) -> np.ndarray:
    bw = np.zeros(n_ticks, dtype=np.int64)
    for i, (start, bytes_per_sec) in enumerate(schedule):
        end = schedule[i + 1][0] if i + 1 < len(schedule) else n_ticks
        if start >= n_ticks:
            break
        bw[start:min(end, n_ticks)] = bytes_per_sec
    return bw


def simulate(config: SimConfig, n_ticks: int) -> tuple[DisplayTrace, SimEventLog]:
    """Run the tick loop; returns the resulting display trace and event log.

    Pure function of (config, n_ticks).
    """
    cfg = config
    if n_ticks < 1:
        raise InvalidConfig(f"n_ticks must be >= 1, got {n_ticks}")
    for s, d in cfg.deauth_events:
        if s >= n_ticks or s + d > n_ticks:
            raise InvalidConfig(
                f"deauth event ({s}, {d}) exceeds the {n_ticks}-tick horizon")

    bandwidth = _per_tick_bandwidth(cfg.bandwidth_schedule, n_ticks)
    link_down = np.zeros(n_ticks, dtype=bool)
    for s, d in cfg.deauth_events:
        link_down[s:s + d] = True

    full_cost = cfg.frame_bytes_full * cfg.fps
    q = cfg.lowres_divisor
    low_bytes = max(1, -(-cfg.frame_bytes_full // (q * q)))
    low_cost = low_bytes * cfg.fps

    send_buffer: deque[tuple[int, int, int]] = deque()  # (frame idx, res factor, cost units)
    head_progress = 0
    arrivals: deque[tuple[int, int]] = deque()  # (frame idx, res factor)
    cam_res = 1
    last_src, last_res = 0, 1
    outage_freeze = False

    src_col = np.zeros(n_ticks, dtype=np.int64)
    res_col = np.ones(n_ticks, dtype=np.int64)
    tag_col = np.full(n_ticks, TAG_CLEAN, dtype="U10")
    up_col = np.zeros(n_ticks, dtype=np.uint8)
    granted_col = np.zeros(n_ticks, dtype=np.float64)
    backlog_col = np.zeros(n_ticks, dtype=np.int64)
    camres_col = np.ones(n_ticks, dtype=np.int64)

    for tick in range(n_ticks):
        # stage 1: capture
        if cfg.adapt_threshold is not None:
            backlog_pre = len(send_buffer)
            if backlog_pre > cfg.adapt_threshold:
                cam_res = q
            elif backlog_pre <= cfg.adapt_threshold / 2:
                cam_res = 1
        cost = full_cost if cam_res == 1 else low_cost
        new_frame = (tick, cam_res, cost)
        if len(send_buffer) >= cfg.buffer_capacity:
            if cfg.drop_policy == DROP_OLDEST:
                send_buffer.popleft()
                head_progress = 0
                send_buffer.append(new_frame)
            # DROP_NEWEST: the captured frame is discarded
        else:
            send_buffer.append(new_frame)

        # stage 2: transfer
        up = not link_down[tick]
        granted = int(bandwidth[tick]) if up else 0
        budget = granted
        while budget > 0 and send_buffer:
            need = send_buffer[0][2] - head_progress
            if budget >= need:
                budget -= need
                head_progress = 0
                idx, res, _ = send_buffer.popleft()
                arrivals.append((idx, res))
            else:
                head_progress += budget
                budget = 0

        # stage 3: display
        popped = min(len(arrivals), cfg.fast_playout_cap)
        if not up:
            outage_freeze = True
        if popped:
            for _ in range(popped):
                last_src, last_res = arrivals.popleft()
            outage_freeze = False

        if popped == 0 and outage_freeze:
            tag = TAG_FREEZE
        elif popped > 1:
            tag = TAG_FAST
        elif last_src == tick:
            tag = TAG_LOWRES if last_res > 1 else TAG_CLEAN
        else:
            tag = TAG_SLOW

        src_col[tick] = last_src
        res_col[tick] = last_res
        tag_col[tick] = tag
        up_col[tick] = int(up)
        granted_col[tick] = granted / cfg.fps
        backlog_col[tick] = len(send_buffer)
        camres_col[tick] = cam_res

    trace = DisplayTrace(src_col, res_col, tag_col)
    log = SimEventLog(np.arange(n_ticks, dtype=np.int64), up_col, granted_col,
                      backlog_col, camres_col, src_col.copy(), tag_col.copy())
    return trace, log


def trace_to_effects_summary(log: SimEventLog) -> list[tuple[str, int, int]]:
    """Maximal runs of identical display tags as (tag, start, end) with the
    end exclusive; clean runs are omitted.
    """
    tags = log.display_tag
    spans = []
    start = 0
    for i in range(1, len(tags) + 1):
        if i == len(tags) or tags[i] != tags[start]:
            if tags[start] != TAG_CLEAN:
                spans.append((str(tags[start]), start, i))
            start = i
    return spans
