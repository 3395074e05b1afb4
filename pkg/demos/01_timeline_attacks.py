"""Scripted timeline attacks and what they do to a stream.

Builds each attack trace against a short synthetic clip, prints the
timeline warp around the attack span, and saves the attacked sequence
next to this script under ``out/01/``.
"""

from pathlib import Path

import numpy as np

import streamdeg as sd

OUT = Path(__file__).parent / "out" / "01"

video = sd.generate(sd.SynthConfig(seed=7, n_frames=60, width=48, height=48))
n = len(video)
print(f"source clip: {n} frames of {video.width}x{video.height} @ {video.fps} fps")

# --- slow-freeze-fast ------------------------------------------------------
trace = sd.build_sff_trace(n, t=20, d=18, f=2)
l_slow, l_freeze, l_fast = sd.sff_segment_lengths(18)
print(f"\nslow-freeze-fast, onset 20, duration 18 "
      f"-> segments {l_slow}/{l_freeze}/{l_fast}")
for tick in range(18, 42, 3):
    print(f"  tick {tick:2d} shows source {trace.src_index[tick]:2d}  [{trace.tag[tick]}]")
print(f"  tick 38 shows source {trace.src_index[38]} -> resynchronized")

attacked = sd.apply_trace(video, trace)
sd.save_sequence(attacked, OUT / "sff", "pgm_dir")
sd.write_trace_csv(trace, OUT / "sff" / "trace.csv")

# --- low resolution --------------------------------------------------------
trace = sd.build_lowres_trace(n, t=10, d=30, r=4)
attacked = sd.apply_trace(video, trace)
changed = [i for i in range(n)
           if attacked.frames[i].pixels.tobytes() != video.frames[i].pixels.tobytes()]
print(f"\nlow resolution r=4 over [10, 40): {len(changed)} frames degraded "
      f"(ticks {changed[0]}..{changed[-1]}), timeline untouched")

# --- replication -----------------------------------------------------------
trace = sd.build_replicate_trace(n, k=1, period=10)
dup = np.flatnonzero(trace.tag == "replicated")
print(f"\nreplicate 1-in-10: duplicated ticks {list(dup)}")
print(f"  tick 9 shows source {trace.src_index[9]} (copy of the previous frame)")

# --- extended freeze over an anomaly ---------------------------------------
video2 = sd.generate(sd.SynthConfig(seed=8, n_frames=120,
                                    anomaly=sd.Anomaly(60, 12, "fast", 5)))
trace = sd.build_extended_freeze_trace(120, (60, 72), s=4, f=2)
freeze = np.flatnonzero(trace.tag == "freeze")
print(f"\nextended freeze: slow 4 ticks, freeze {len(freeze)} ticks "
      f"covering the anomaly span [60, 72), fast 8 ticks")
print(f"  freeze holds source {trace.src_index[freeze[0]]}; "
      f"tick {int(freeze[0]) - 14}..{int(freeze[-1])} never show the anomaly")

print(f"\nartifacts under {OUT}")
