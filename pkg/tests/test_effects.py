import random

import numpy as np
import pytest

from streamdeg.effects import (
    TAG_CLEAN,
    TAG_FAST,
    TAG_FREEZE,
    TAG_LOWRES,
    TAG_REPLICATED,
    TAG_SLOW,
    AttackSpec,
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
from streamdeg.errors import (
    AnomalyTooLong,
    InvalidK,
    LengthMismatch,
    NoAnomaly,
    SpanOutOfRange,
    TraceMismatch,
)
from streamdeg.frameio import Frame
from streamdeg.synth import Anomaly, SynthConfig, generate


def frame_of(values):
    return Frame(np.asarray(values, dtype=np.uint8))


# ---------------------------------------------------------------------------
# Slow-freeze-fast
# ---------------------------------------------------------------------------

def test_sff_hand_traced_example():
    trace = build_sff_trace(20, 10, 6, 2)
    assert list(trace.src_index[10:16]) == [10, 10, 10, 12, 14, 15]
    assert trace.src_index[16] == 16
    assert list(trace.tag[10:16]) == ["slow", "slow", "freeze", "fast", "fast", "fast"]
    assert list(trace.src_index[:10]) == list(range(10))


def test_sff_zero_duration_is_identity():
    assert build_sff_trace(20, 10, 0, 2).equals(identity_trace(20))


def test_sff_segment_lengths_at_500():
    assert sff_segment_lengths(500) == (167, 83, 250)


def test_sff_rounds_half_up():
    # d/3 and d/6 round half up, fast absorbs the remainder
    assert sff_segment_lengths(3) == (1, 1, 1)   # 1.0, 0.5 -> 1
    assert sff_segment_lengths(9) == (3, 2, 4)   # 3.0, 1.5 -> 2
    for d in range(0, 200):
        l_slow, l_freeze, l_fast = sff_segment_lengths(d)
        assert l_slow + l_freeze + l_fast == d
        assert min(l_slow, l_freeze, l_fast) >= 0


def test_sff_out_of_range():
    with pytest.raises(SpanOutOfRange):
        build_sff_trace(300, 0, 500)
    with pytest.raises(SpanOutOfRange):
        build_sff_trace(300, 200, 101)


def test_sff_property_suite():
    rnd = random.Random(4242)
    for _ in range(50):
        n = rnd.randrange(4, 1500)
        d = rnd.randrange(0, n + 1)
        t = rnd.randrange(0, n - d + 1)
        f = rnd.choice([2, 3])
        trace = build_sff_trace(n, t, d, f)
        validate_trace(trace, n)
        l_slow, l_freeze, l_fast = sff_segment_lengths(d)
        assert np.sum(trace.tag == TAG_SLOW) == l_slow
        assert np.sum(trace.tag == TAG_FREEZE) == l_freeze
        assert np.sum(trace.tag == TAG_FAST) == l_fast
        # identity outside the attack span, resynchronized at t + d
        outside = np.r_[np.arange(0, t), np.arange(t + d, n)]
        assert np.array_equal(trace.src_index[outside], outside)
        assert np.all(trace.tag[outside] == TAG_CLEAN)
        if d:
            # conservation: d ticks consume exactly d sources (no drift)
            assert trace.src_index[t + d - 1] == t + d - 1


# ---------------------------------------------------------------------------
# Low resolution and combined
# ---------------------------------------------------------------------------

def test_lowres_marks_exact_span():
    trace = build_lowres_trace(20, 5, 3, 4)
    assert np.array_equal(trace.src_index, np.arange(20))
    assert list(np.flatnonzero(trace.res_factor == 4)) == [5, 6, 7]
    assert list(np.flatnonzero(trace.tag == TAG_LOWRES)) == [5, 6, 7]


def test_lowres_full_span():
    trace = build_lowres_trace(12, 0, 12, 2)
    assert np.all(trace.res_factor == 2)
    assert np.array_equal(trace.src_index, np.arange(12))


def test_lowres_label_remap_is_identity():
    trace = build_lowres_trace(10, 2, 5, 4)
    labels = np.array([0, 1] * 5, dtype=np.uint8)
    assert np.array_equal(remap_labels(labels, trace, "displayed"), labels)


def test_combined_is_sff_plus_resolution():
    sff = build_sff_trace(20, 10, 6, 2)
    combined = build_combined_trace(20, 10, 6, 2, 4)
    assert np.array_equal(combined.src_index, sff.src_index)
    assert np.array_equal(combined.tag, sff.tag)
    assert np.all(combined.res_factor[10:16] == 4)
    assert np.all(combined.res_factor[:10] == 1) and np.all(combined.res_factor[16:] == 1)


def test_combined_zero_duration_identity():
    assert build_combined_trace(15, 5, 0).equals(identity_trace(15))


def test_combined_factor_one_equals_sff():
    assert build_combined_trace(20, 10, 6, 2, 1).equals(build_sff_trace(20, 10, 6, 2))


# ---------------------------------------------------------------------------
# Replication
# ---------------------------------------------------------------------------

def test_replicate_one_per_ten():
    trace = build_replicate_trace(20, 1, 10)
    expected = list(range(0, 9)) + [8] + list(range(10, 19)) + [18]
    assert list(trace.src_index) == expected
    assert list(np.flatnonzero(trace.tag == TAG_REPLICATED)) == [9, 19]


def test_replicate_two_per_ten_first_block():
    trace = build_replicate_trace(10, 2, 10)
    assert trace.src_index[8] == 7 and trace.src_index[9] == 7


def test_replicate_zero_is_identity():
    assert build_replicate_trace(25, 0, 10).equals(identity_trace(25))


def test_replicate_partial_final_block():
    # 15-tick tail block of length 5 < period - k = 8: left at identity
    trace = build_replicate_trace(25, 2, 10)
    assert np.array_equal(trace.src_index[20:], np.arange(20, 25))
    # length 9 >= 8: replicated positions that exist are filled
    trace = build_replicate_trace(29, 2, 10)
    assert trace.src_index[28] == 27
    assert trace.tag[28] == TAG_REPLICATED


def test_replicate_invalid_k():
    with pytest.raises(InvalidK):
        build_replicate_trace(20, 10, 10)
    with pytest.raises(InvalidK):
        build_replicate_trace(20, -1, 10)
    with pytest.raises(InvalidK):
        build_replicate_trace(20, 0, 1)


# ---------------------------------------------------------------------------
# Extended freeze
# ---------------------------------------------------------------------------

def test_extended_freeze_hand_traced():
    trace = build_extended_freeze_trace(60, (30, 36), 4, 2)
    # onset 26; slow 4 ticks consume ceil(4/2) = 2 sources; freeze holds 27
    assert np.all(trace.src_index[30:42] == 27)
    assert np.all(trace.tag[30:42] == TAG_FREEZE)
    assert trace.src_index[50] == 50 and trace.tag[50] == TAG_CLEAN
    validate_trace(trace)
    # freeze covers the anomaly span
    assert set(range(30, 36)) <= set(np.flatnonzero(trace.tag == TAG_FREEZE))


def test_extended_freeze_anomaly_too_long():
    with pytest.raises(AnomalyTooLong):
        build_extended_freeze_trace(200, (50, 50 + 13), 4, 2)  # 13 > 3*4


def test_extended_freeze_exact_cover_accepted():
    trace = build_extended_freeze_trace(200, (50, 62), 4, 2)  # 12 == 3*4
    assert np.sum(trace.tag == TAG_FREEZE) == 12


def test_extended_freeze_needs_room_for_slow():
    with pytest.raises(SpanOutOfRange):
        build_extended_freeze_trace(200, (2, 5), 4, 2)  # a0 < s


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def test_apply_identity_is_bit_identical():
    video = generate(SynthConfig(seed=5, n_frames=12))
    out = apply_trace(video, identity_trace(12))
    for a, b in zip(video.frames, out.frames):
        assert a.pixels.tobytes() == b.pixels.tobytes()
    assert out.fps == video.fps
    assert np.array_equal(out.labels, video.labels)


def test_apply_freeze_run_frames_identical():
    video = generate(SynthConfig(seed=6, n_frames=40))
    trace = build_sff_trace(40, 10, 18, 2)
    out = apply_trace(video, trace)
    freeze = np.flatnonzero(trace.tag == TAG_FREEZE)
    ref = out.frames[freeze[0]].pixels.tobytes()
    for i in freeze[1:]:
        assert out.frames[i].pixels.tobytes() == ref


def test_apply_degrades_marked_ticks():
    video = generate(SynthConfig(seed=6, n_frames=10))
    trace = build_lowres_trace(10, 3, 4, 2)
    out = apply_trace(video, trace)
    for i in range(10):
        expected = degrade_resolution(video.frames[i], 2).pixels if 3 <= i < 7 \
            else video.frames[i].pixels
        assert np.array_equal(out.frames[i].pixels, expected)
        assert out.frames[i].res_factor == (2 if 3 <= i < 7 else 1)


def test_apply_trace_length_mismatch():
    video = generate(SynthConfig(seed=1, n_frames=10))
    with pytest.raises(TraceMismatch):
        apply_trace(video, identity_trace(9))


def test_degrade_resolution_hand_example():
    out = degrade_resolution(frame_of([[0, 255], [0, 255]]), 2)
    assert np.all(out.pixels == 128)  # mean 127.5 rounds half away from zero
    assert out.res_factor == 2


def test_degrade_factor_one_is_identity():
    f = frame_of([[1, 2], [3, 4]])
    out = degrade_resolution(f, 1)
    assert np.array_equal(out.pixels, f.pixels) and out.res_factor == 1


def test_degrade_constant_frame_fixed_point():
    f = frame_of(np.full((6, 6), 77))
    for r in (2, 3, 4, 5):
        assert np.all(degrade_resolution(f, r).pixels == 77)


def test_degrade_idempotent_when_factor_divides():
    rnd = np.random.RandomState(3)
    f = Frame(rnd.randint(0, 256, (12, 8)).astype(np.uint8))
    once = degrade_resolution(f, 4)
    twice = degrade_resolution(once, 4)
    assert np.array_equal(once.pixels, twice.pixels)


def test_degrade_edge_blocks_smaller():
    # 3x3 with r=2: blocks are 2x2, 2x1, 1x2, 1x1
    f = frame_of([[10, 20, 90], [30, 40, 90], [5, 5, 200]])
    out = degrade_resolution(f, 2).pixels
    assert out[0, 0] == out[0, 1] == out[1, 0] == out[1, 1] == 25  # (10+20+30+40)/4
    assert out[0, 2] == out[1, 2] == 90
    assert out[2, 0] == out[2, 1] == 5
    assert out[2, 2] == 200


# ---------------------------------------------------------------------------
# Label remapping
# ---------------------------------------------------------------------------

def test_remap_identity_trace_both_modes():
    labels = np.array([0, 1, 1, 0], dtype=np.uint8)
    trace = identity_trace(4)
    assert np.array_equal(remap_labels(labels, trace, "realtime"), labels)
    assert np.array_equal(remap_labels(labels, trace, "displayed"), labels)


def test_remap_displayed_follows_frozen_source():
    trace = build_sff_trace(20, 10, 6, 2)
    labels = np.zeros(20, dtype=np.uint8)
    labels[13] = 1  # source 13 is never displayed ([10,10,10,12,14,15])
    displayed = remap_labels(labels, trace, "displayed")
    assert not displayed[10:16].any()
    realtime = remap_labels(labels, trace, "realtime")
    assert realtime[13] == 1


def test_remap_length_mismatch():
    with pytest.raises(LengthMismatch):
        remap_labels(np.zeros(5, dtype=np.uint8), identity_trace(6), "realtime")


# ---------------------------------------------------------------------------
# Attack spec dispatch
# ---------------------------------------------------------------------------

def test_draw_onset_deterministic_and_in_range():
    for seed in range(30):
        t1 = draw_onset(seed, 1000, 300)
        t2 = draw_onset(seed, 1000, 300)
        assert t1 == t2
        assert 0 <= t1 <= 700


def test_build_trace_random_onset_recorded():
    spec = AttackSpec(kind="sff", duration=50, seed=9)
    trace, onset = build_trace(spec, 200)
    assert onset == draw_onset(9, 200, 50)
    assert trace.equals(build_sff_trace(200, onset, 50, 2))


def test_build_trace_extfreeze_from_labels():
    labels = np.zeros(100, dtype=np.uint8)
    labels[40:46] = 1
    spec = AttackSpec(kind="extfreeze", slow_len=4, slow_factor=2)
    trace, onset = build_trace(spec, 100, labels)
    assert onset == 36
    assert trace.equals(build_extended_freeze_trace(100, (40, 46), 4, 2))


def test_build_trace_extfreeze_requires_anomaly():
    with pytest.raises(NoAnomaly):
        build_trace(AttackSpec(kind="extfreeze"), 100, np.zeros(100, dtype=np.uint8))


# ---------------------------------------------------------------------------
# Trace CSV
# ---------------------------------------------------------------------------

def test_trace_csv_round_trip(tmp_path):
    trace = build_combined_trace(30, 8, 12, 2, 4)
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, path)
    head = path.read_text().splitlines()[0]
    assert head == "tick,src_index,resolution,tag"
    back = read_trace_csv(path)
    assert trace.equals(back)
