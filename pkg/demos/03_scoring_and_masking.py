"""PSNR anomaly scoring, per-effect signatures, and anomaly masking.

Scores a synthetic clip with the previous-frame predictor, shows how each
degradation effect stamps its own signature on the PSNR series, and then
synchronizes an extended freeze with the clip's anomaly so the detector
never sees it.
"""

import numpy as np

import streamdeg as sd

# a clip with one fast-motion anomaly at frames 200..229
video = sd.generate(sd.SynthConfig(seed=11, n_frames=400,
                                   anomaly=sd.Anomaly(200, 30, "fast", 5)))
clean = sd.score_video(video, "prev")
peak = int(np.argmax(clean.score))
print(f"clean clip: PSNR range {clean.psnr.min():.1f}..{clean.psnr.max():.1f} dB, "
      f"score peaks at frame {peak} (anomaly span is [200, 230))")

# per-effect signatures under a slow-freeze-fast attack
trace = sd.build_sff_trace(400, 40, 120, 2)
series = sd.score_video(sd.apply_trace(video, trace))
print("\nPSNR by effect span under slow-freeze-fast at [40, 160):")
for row in sd.effect_summary(series, trace):
    span = "baseline" if row["start"] is None else f"[{row['start']}, {row['end']})"
    print(f"  {row['tag']:7s} {span:12s} mean {row['mean_psnr']:6.2f} dB  "
          f"var {row['var_psnr']:8.2f}  min {row['min_psnr']:6.2f}")
print("  -> freeze pins PSNR at the clamp (variance 0), slow alternates "
      "(high variance), fast sits below the baseline mean")

# masking: stretch the freeze to cover the anomaly
tau = float(np.percentile(clean.score, 95))
print(f"\nalarm threshold tau = {tau:.3f} (95th percentile of clean scores)")
verdict = sd.masking_report(clean, video.labels, tau)[0]
print(f"clean run:    max score in span {verdict.max_score_in_span:.3f} "
      f"-> masked = {verdict.masked}")

freeze_trace = sd.build_extended_freeze_trace(400, (200, 230), s=10, f=2)
attacked = sd.score_video(sd.apply_trace(video, freeze_trace))
verdict = sd.masking_report(attacked, video.labels, tau)[0]
print(f"under freeze: max score in span {verdict.max_score_in_span:.3f} "
      f"-> masked = {verdict.masked}")
print("the anomaly happens while the display shows a frozen frame; "
      "the PSNR statistic never drops")
