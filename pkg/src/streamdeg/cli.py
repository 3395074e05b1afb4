"""Command-line front end wiring the pipeline end to end.

Subcommands: ``synth`` (generate a labeled synthetic clip), ``attack``
(apply a scripted timeline attack), ``netsim`` (run the network
simulation against a clip), ``score`` (per-frame PSNR anomaly scores),
``eval`` (AUC report with deltas, false alarms, masking verdicts, effect
summaries).

Exit codes: 0 success, 1 I/O failure, 2 validation/flag error.

Reproducibility: every command records its fully resolved configuration
(including seeds and randomly drawn onsets) in ``run.json`` inside its
output directory, or ``<output>.run.json`` next to single-file outputs.
Identical command lines with explicit seeds produce byte-identical
artifacts.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import detector, effects, evaluate, frameio, netsim, synth
from .errors import IoFailure, ToolkitError, ValidationError


def _write_run_file(path: Path, command: str, params: dict) -> None:
    doc = {"command": command, "params": params}
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, _, h = text.partition("x")
        return int(w), int(h)
    except ValueError:
        raise ValidationError(f"--size expects WxH, got {text!r}") from None


def _parse_anomaly(text: str) -> synth.Anomaly:
    parts = text.split(":")
    if len(parts) < 2:
        raise ValidationError(f"--anomaly expects start:len[:kind[:velocity]], got {text!r}")
    try:
        start, length = int(parts[0]), int(parts[1])
        kind = parts[2] if len(parts) > 2 else synth.ANOMALY_FAST
        velocity = int(parts[3]) if len(parts) > 3 else 5
    except ValueError as e:
        raise ValidationError(f"bad --anomaly value {text!r}: {e}") from None
    return synth.Anomaly(start, length, kind, velocity)


def _parse_named(values: list[str], flag: str) -> list[tuple[str, str]]:
    pairs = []
    for v in values:
        name, sep, path = v.partition("=")
        if not sep or not name or not path:
            raise ValidationError(f"{flag} expects name=path, got {v!r}")
        pairs.append((name, path))
    return pairs


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_synth(args) -> int:
    cfg = synth.SynthConfig(
        seed=args.seed,
        n_frames=args.frames,
        width=_parse_size(args.size)[0],
        height=_parse_size(args.size)[1],
        fps=args.fps,
        background_noise_amp=args.noise_amp,
        object_size=args.object_size,
        normal_velocity=args.velocity,
        anomaly=_parse_anomaly(args.anomaly) if args.anomaly else None,
    )
    video = synth.generate(cfg)
    out = Path(args.out)
    frameio.save_sequence(video, out, args.format)
    params = {
        "seed": cfg.seed, "frames": cfg.n_frames, "width": cfg.width,
        "height": cfg.height, "fps": cfg.fps, "noise_amp": cfg.background_noise_amp,
        "object_size": cfg.object_size, "velocity": cfg.normal_velocity,
        "anomaly": None if cfg.anomaly is None else {
            "start": cfg.anomaly.start, "len": cfg.anomaly.length,
            "kind": cfg.anomaly.kind, "velocity": cfg.anomaly.velocity},
        "format": args.format, "out": str(args.out),
    }
    _write_run_file(out / "run.json", "synth", params)
    return 0


def cmd_attack(args) -> int:
    video = frameio.load_sequence(args.input)
    if args.type in (effects.KIND_SFF, effects.KIND_LOWRES, effects.KIND_COMBINED) \
            and args.duration is None:
        raise ValidationError(f"--duration is required for --type {args.type}")
    spec = effects.AttackSpec(
        kind=args.type,
        onset=args.onset,
        duration=args.duration or 0,
        slow_factor=args.slow_factor,
        lowres_factor=args.lowres_factor,
        k=args.k,
        period=args.period,
        slow_len=args.slow_len,
        seed=args.seed,
    )
    trace, onset = effects.build_trace(spec, len(video), video.labels)
    attacked = effects.apply_trace(video, trace, args.labels)
    out = Path(args.out)
    frameio.save_sequence(attacked, out, args.format)
    effects.write_trace_csv(trace, out / "trace.csv")
    params = {
        "in": str(args.input), "type": args.type, "onset": onset,
        "duration": spec.duration, "slow_factor": spec.slow_factor,
        "lowres_factor": spec.lowres_factor, "k": spec.k, "period": spec.period,
        "slow_len": spec.slow_len, "seed": spec.seed, "labels": args.labels,
        "format": args.format, "out": str(args.out),
    }
    _write_run_file(out / "run.json", "attack", params)
    return 0


def cmd_netsim(args) -> int:
    video = frameio.load_sequence(args.input)
    cfg = netsim.load_sim_config(args.sim)
    trace, log = netsim.simulate(cfg, len(video))
    attacked = effects.apply_trace(video, trace)
    out = Path(args.out)
    frameio.save_sequence(attacked, out, args.format)
    netsim.write_event_log_csv(log, out / "events.csv")
    effects.write_trace_csv(trace, out / "trace.csv")
    params = {"in": str(args.input), "sim": str(args.sim), "out": str(args.out),
              "format": args.format, "config": cfg.to_dict()}
    _write_run_file(out / "run.json", "netsim", params)
    return 0


def cmd_score(args) -> int:
    video = frameio.load_sequence(args.input)
    series = detector.score_video(video, args.predictor, args.clamp)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    detector.write_scores_csv(series, video.labels, out)
    params = {"in": str(args.input), "predictor": args.predictor,
              "clamp": args.clamp, "out": str(args.out)}
    _write_run_file(Path(str(out) + ".run.json"), "score", params)
    return 0


def cmd_eval(args) -> int:
    score_paths = _parse_named(args.scores, "--scores")
    trace_paths = dict(_parse_named(args.trace or [], "--trace"))
    names = [n for n, _ in score_paths]
    unknown = set(trace_paths) - set(names)
    if unknown:
        raise ValidationError(f"--trace names {sorted(unknown)} match no --scores run")

    runs = []
    for name, path in score_paths:
        series, labels = detector.read_scores_csv(path)
        runs.append((name, series, labels))

    roc_by_name = {n: evaluate.roc_auc(s.score, l) for n, s, l in runs}
    if len(runs) >= 2:
        comparison = evaluate.compare_runs([(n, roc_by_name[n]) for n, _, _ in runs])
        run_rows = comparison["runs"]
        baseline = comparison["baseline"]
    else:
        r = roc_by_name[runs[0][0]]
        run_rows = [{"name": runs[0][0], "auc": r.auc, "n_pos": r.n_pos, "n_neg": r.n_neg}]
        baseline = runs[0][0]

    if args.tau is not None:
        tau, tau_source = args.tau, "flag"
    else:
        tau = float(np.percentile(runs[0][1].score, 95.0))
        tau_source = f"p95({baseline})"

    report = {
        "baseline": baseline,
        "runs": run_rows,
        "threshold": {"tau": tau, "source": tau_source},
        "false_alarms": {},
        "masking": {},
        "effect_summaries": {},
        "config": {"scores": [f"{n}={p}" for n, p in score_paths],
                   "trace": [f"{n}={p}" for n, p in trace_paths.items()],
                   "tau": args.tau},
    }
    for name, series, labels in runs:
        fa = evaluate.false_alarms(series, labels, tau)
        report["false_alarms"][name] = {"frame_count": fa.frame_count,
                                        "event_count": fa.event_count}
        verdicts = evaluate.masking_report(series, labels, tau)
        report["masking"][name] = [
            {"span": list(v.anomaly_span), "max_score_in_span": v.max_score_in_span,
             "threshold": v.threshold, "masked": v.masked}
            for v in verdicts]
        if name in trace_paths:
            trace = effects.read_trace_csv(trace_paths[name])
            report["effect_summaries"][name] = evaluate.effect_summary(series, trace)

    out = Path(args.report)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot write {out}: {e}") from e
    _write_run_file(Path(str(out) + ".run.json"), "eval", report["config"])
    if len(run_rows) >= 2:
        print(evaluate.format_comparison({"runs": run_rows}))
    else:
        print(f"{run_rows[0]['name']}: auc={run_rows[0]['auc']:.4f}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamdeg",
        description="Generate stream-degradation attacks on video sequences and "
                    "evaluate their impact on prediction-based anomaly scoring.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a seeded synthetic clip with labels")
    p.add_argument("--seed", type=int, default=0, help="64-bit generator seed")
    p.add_argument("--frames", type=int, default=400, help="number of frames")
    p.add_argument("--size", default="64x64", help="frame size as WxH")
    p.add_argument("--fps", type=int, default=30)
    p.add_argument("--noise-amp", type=int, default=20,
                   help="background texture amplitude in luma units")
    p.add_argument("--object-size", type=int, default=8, help="moving square edge, pixels")
    p.add_argument("--velocity", type=int, default=1, help="normal speed, pixels/frame")
    p.add_argument("--anomaly", default=None,
                   help="anomaly as start:len[:kind[:velocity]]; kind is fast or appearance")
    p.add_argument("--format", choices=[frameio.FORMAT_PGM_DIR, frameio.FORMAT_Y4M],
                   default=frameio.FORMAT_PGM_DIR)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("attack", help="apply a scripted timeline attack")
    p.add_argument("--in", dest="input", required=True, help="input manifest.json")
    p.add_argument("--type", required=True,
                   choices=[effects.KIND_SFF, effects.KIND_LOWRES, effects.KIND_COMBINED,
                            effects.KIND_REPLICATE, effects.KIND_EXTFREEZE])
    p.add_argument("--onset", type=int, default=None,
                   help="attack start tick; drawn from --seed when omitted")
    p.add_argument("--duration", type=int, default=None, help="attack length in ticks")
    p.add_argument("--slow-factor", type=int, default=2, help="slow-motion duplication factor")
    p.add_argument("--lowres-factor", type=int, default=4, help="box-degradation block size")
    p.add_argument("--k", type=int, default=1, help="replicate: frames duplicated per block")
    p.add_argument("--period", type=int, default=10, help="replicate: block length")
    p.add_argument("--slow-len", type=int, default=None,
                   help="extfreeze: slow segment length (freeze is 3x this)")
    p.add_argument("--seed", type=int, default=0, help="seed for random onset selection")
    p.add_argument("--labels", choices=[effects.LABELS_REALTIME, effects.LABELS_DISPLAYED],
                   default=effects.LABELS_REALTIME, help="label remapping mode")
    p.add_argument("--format", choices=[frameio.FORMAT_PGM_DIR, frameio.FORMAT_Y4M],
                   default=frameio.FORMAT_PGM_DIR)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("netsim", help="emergent attack via network simulation")
    p.add_argument("--in", dest="input", required=True, help="input manifest.json")
    p.add_argument("--sim", required=True, help="SimConfig JSON file")
    p.add_argument("--format", choices=[frameio.FORMAT_PGM_DIR, frameio.FORMAT_Y4M],
                   default=frameio.FORMAT_PGM_DIR)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_netsim)

    p = sub.add_parser("score", help="per-frame PSNR anomaly scores")
    p.add_argument("--in", dest="input", required=True, help="input manifest.json")
    p.add_argument("--predictor", choices=[detector.PREDICTOR_PREV, detector.PREDICTOR_LINEAR],
                   default=detector.PREDICTOR_PREV)
    p.add_argument("--clamp", type=float, default=detector.DEFAULT_CLAMP_DB,
                   help="PSNR clamp in dB")
    p.add_argument("--out", required=True, help="output scores.csv path")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="AUC report with false alarms and masking verdicts")
    p.add_argument("--scores", action="append", required=True, metavar="NAME=PATH",
                   help="scores CSV per run; first run is the baseline (repeatable)")
    p.add_argument("--trace", action="append", default=None, metavar="NAME=PATH",
                   help="trace CSV for a named run, enables its effect summary (repeatable)")
    p.add_argument("--tau", type=float, default=None,
                   help="alarm threshold; default is the 95th percentile of baseline scores")
    p.add_argument("--report", required=True, help="output report JSON path")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IoFailure as e:
        print(f"streamdeg {args.command}: I/O error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"streamdeg {args.command}: I/O error: {e}", file=sys.stderr)
        return 1
    except ToolkitError as e:
        print(f"streamdeg {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
