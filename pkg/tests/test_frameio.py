import json
import random
from fractions import Fraction

import numpy as np
import pytest

from streamdeg import frameio
from streamdeg.errors import (
    BadSignature,
    DimensionMismatch,
    LabelLengthMismatch,
    MalformedManifest,
    MissingFile,
    ToolkitError,
    TruncatedFrame,
    UnsupportedColorspace,
    ValidationError,
)
from streamdeg.frameio import (
    Frame,
    VideoSequence,
    load_sequence,
    parse_pgm,
    parse_y4m,
    pgm_bytes,
    save_sequence,
    y4m_bytes,
)


def make_video(pixel_arrays, fps=30, labels=None):
    frames = [Frame(np.asarray(p, dtype=np.uint8)) for p in pixel_arrays]
    if labels is None:
        labels = np.zeros(len(frames), dtype=np.uint8)
    return VideoSequence(Fraction(fps), frames, labels)


def random_video(rnd, n_frames=None):
    n = n_frames or rnd.randrange(2, 8)
    w, h = rnd.randrange(1, 12), rnd.randrange(1, 12)
    arrays = [[[rnd.randrange(256) for _ in range(w)] for _ in range(h)] for _ in range(n)]
    labels = np.array([rnd.randrange(2) for _ in range(n)], dtype=np.uint8)
    fps = Fraction(rnd.choice([30, 25, Fraction(30000, 1001)]))
    return make_video(arrays, fps, labels)


# ---------------------------------------------------------------------------
# PGM
# ---------------------------------------------------------------------------

def test_pgm_golden_bytes():
    px = np.arange(16, dtype=np.uint8).reshape(4, 4)
    assert pgm_bytes(px) == b"P5\n4 4\n255\n" + bytes(range(16))


def test_pgm_parse_golden():
    data = b"P5\n4 4\n255\n" + bytes(range(16))
    px = parse_pgm(data)
    assert px.shape == (4, 4)
    assert px.tobytes() == bytes(range(16))


def test_pgm_comments_tolerated_on_read():
    data = b"P5\n# a comment\n4 2 # trailing\n255\n" + bytes(8)
    assert parse_pgm(data).shape == (2, 4)


def test_pgm_never_emits_comments():
    assert b"#" not in pgm_bytes(np.zeros((3, 3), dtype=np.uint8))


def test_pgm_rejects_wrong_magic():
    with pytest.raises(BadSignature):
        parse_pgm(b"P6\n1 1\n255\n\x00\x00\x00")


def test_pgm_rejects_short_raster():
    with pytest.raises(TruncatedFrame):
        parse_pgm(b"P5\n4 4\n255\n" + bytes(10))


def test_pgm_rejects_16bit():
    with pytest.raises(UnsupportedColorspace):
        parse_pgm(b"P5\n1 1\n65535\n\x00\x00")


# ---------------------------------------------------------------------------
# Manifest loading
# ---------------------------------------------------------------------------

def write_pgm_dir(tmp_path, payloads, width, height, labels_lines=None, fps=30):
    names = []
    for i, payload in enumerate(payloads):
        name = f"f{i}.pgm"
        (tmp_path / name).write_bytes(
            b"P5\n%d %d\n255\n" % (width, height) + payload)
        names.append(name)
    doc = {"fps": fps, "width": width, "height": height,
           "frames": names, "labels": None, "format": "pgm_dir"}
    if labels_lines is not None:
        (tmp_path / "labels.txt").write_text("".join(f"{v}\n" for v in labels_lines))
        doc["labels"] = "labels.txt"
    mpath = tmp_path / "manifest.json"
    mpath.write_text(json.dumps(doc))
    return mpath


def test_load_two_pgm_frames_byte_exact(tmp_path):
    a = bytes(range(16))
    b = bytes(range(16, 32))
    mpath = write_pgm_dir(tmp_path, [a, b], 4, 4)
    video = load_sequence(mpath)
    assert len(video) == 2 and video.width == 4 and video.height == 4
    assert video.frames[0].pixels.tobytes() == a
    assert video.frames[1].pixels.tobytes() == b


def test_load_without_labels_defaults_to_zeros(tmp_path):
    mpath = write_pgm_dir(tmp_path, [bytes(16)] * 5, 4, 4)
    video = load_sequence(mpath)
    assert np.array_equal(video.labels, np.zeros(5, dtype=np.uint8))


def test_load_label_length_mismatch(tmp_path):
    mpath = write_pgm_dir(tmp_path, [bytes(16)] * 5, 4, 4, labels_lines=[0, 1, 0, 1])
    with pytest.raises(LabelLengthMismatch):
        load_sequence(mpath)


def test_load_missing_manifest():
    with pytest.raises(MissingFile):
        load_sequence("/nonexistent/manifest.json")


def test_load_missing_frame_file(tmp_path):
    mpath = write_pgm_dir(tmp_path, [bytes(16)] * 2, 4, 4)
    (tmp_path / "f1.pgm").unlink()
    with pytest.raises(MissingFile):
        load_sequence(mpath)


def test_load_dimension_mismatch(tmp_path):
    mpath = write_pgm_dir(tmp_path, [bytes(16), bytes(16)], 4, 4)
    (tmp_path / "f1.pgm").write_bytes(b"P5\n2 2\n255\n" + bytes(4))
    with pytest.raises(DimensionMismatch):
        load_sequence(mpath)


def test_load_rejects_single_frame(tmp_path):
    mpath = write_pgm_dir(tmp_path, [bytes(16)], 4, 4)
    with pytest.raises(MalformedManifest):
        load_sequence(mpath)


def test_load_malformed_json(tmp_path):
    mpath = tmp_path / "manifest.json"
    mpath.write_text("{not json")
    with pytest.raises(MalformedManifest):
        load_sequence(mpath)


def test_load_pattern_manifest(tmp_path):
    for i in range(3):
        (tmp_path / ("frame_%03d.pgm" % i)).write_bytes(b"P5\n2 2\n255\n" + bytes([i] * 4))
    mpath = tmp_path / "manifest.json"
    mpath.write_text(json.dumps({
        "fps": 30, "width": 2, "height": 2,
        "frames": {"pattern": "frame_%03d.pgm", "count": 3},
        "labels": None, "format": "pgm_dir"}))
    video = load_sequence(mpath)
    assert len(video) == 3
    assert video.frames[2].pixels[0, 0] == 2


def test_manifest_determinism(tmp_path):
    rnd = random.Random(5)
    mpath = write_pgm_dir(tmp_path, [bytes(rnd.randrange(256) for _ in range(16))
                                     for _ in range(4)], 4, 4, labels_lines=[0, 1, 1, 0])
    v1, v2 = load_sequence(mpath), load_sequence(mpath)
    assert v1.fps == v2.fps
    assert np.array_equal(v1.labels, v2.labels)
    for a, b in zip(v1.frames, v2.frames):
        assert np.array_equal(a.pixels, b.pixels)


# ---------------------------------------------------------------------------
# Round trips
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("fmt", ["pgm_dir", "y4m"])
def test_save_load_round_trip(tmp_path, fmt):
    rnd = random.Random(17)
    for case in range(10):
        video = random_video(rnd)
        if fmt == "y4m":
            # mono writer allows any size; keep as-is
            pass
        out = tmp_path / f"{fmt}_{case}"
        save_sequence(video, out, fmt)
        back = load_sequence(out / "manifest.json")
        assert back.fps == video.fps
        assert np.array_equal(back.labels, video.labels)
        assert len(back) == len(video)
        for a, b in zip(video.frames, back.frames):
            assert a.pixels.tobytes() == b.pixels.tobytes()


def test_save_rejects_short_sequence(tmp_path):
    video = make_video([np.zeros((2, 2))])
    with pytest.raises(ValidationError):
        save_sequence(video, tmp_path / "x")


def test_y4m_header_golden(tmp_path):
    video = make_video([np.zeros((8, 8))] * 2, fps=30)
    data = y4m_bytes(video)
    assert data.startswith(b"YUV4MPEG2 W8 H8 ")
    assert data.count(b"FRAME\n") == 2


def test_y4m_rational_fps_round_trip(tmp_path):
    video = make_video([np.zeros((4, 4))] * 3, fps=Fraction(30000, 1001))
    save_sequence(video, tmp_path / "v", "y4m")
    back = load_sequence(tmp_path / "v" / "manifest.json")
    assert back.fps == Fraction(30000, 1001)


# ---------------------------------------------------------------------------
# Y4M parsing
# ---------------------------------------------------------------------------

def test_parse_y4m_hand_written_mono():
    data = (b"YUV4MPEG2 W2 H2 F25:1 Ip A1:1 Cmono\n"
            b"FRAME\n\x00\x01\x02\x03"
            b"FRAME\n\x04\x05\x06\x07")
    video = parse_y4m(data)
    assert len(video) == 2
    assert video.fps == 25
    assert list(video.frames[0].pixels.ravel()) == [0, 1, 2, 3]
    assert list(video.frames[1].pixels.ravel()) == [4, 5, 6, 7]


def test_parse_y4m_420_discards_chroma():
    y = bytes([10, 20, 30, 40])
    chroma = bytes([128, 128])
    data = b"YUV4MPEG2 W2 H2 F30:1 C420\n" + b"FRAME\n" + y + chroma + b"FRAME\n" + y + chroma
    video = parse_y4m(data)
    assert list(video.frames[0].pixels.ravel()) == [10, 20, 30, 40]


def test_parse_y4m_bad_signature():
    with pytest.raises(BadSignature):
        parse_y4m(b"YUV4MPG W2 H2 F25:1\nFRAME\n\x00\x00\x00\x00")


def test_parse_y4m_truncated_third_frame():
    data = (b"YUV4MPEG2 W2 H2 F25:1 Cmono\n"
            b"FRAME\n\x00\x01\x02\x03"
            b"FRAME\n\x04\x05\x06\x07"
            b"FRAME\n\x08\x09")
    with pytest.raises(TruncatedFrame):
        parse_y4m(data)


def test_parse_y4m_unsupported_colorspace():
    with pytest.raises(UnsupportedColorspace):
        parse_y4m(b"YUV4MPEG2 W2 H2 F25:1 C444\nFRAME\n" + bytes(12))


def test_parse_y4m_fuzz_never_faults():
    rnd = random.Random(99)
    valid = (b"YUV4MPEG2 W2 H2 F25:1 Cmono\n"
             b"FRAME\n\x00\x01\x02\x03FRAME\n\x04\x05\x06\x07")
    for _ in range(500):
        if rnd.random() < 0.5:
            blob = bytes(rnd.randrange(256) for _ in range(rnd.randrange(0, 80)))
        else:
            blob = bytearray(valid)
            for _ in range(rnd.randrange(1, 6)):
                blob[rnd.randrange(len(blob))] = rnd.randrange(256)
            blob = bytes(blob[:rnd.randrange(1, len(blob) + 1)])
        try:
            parse_y4m(blob)
        except ToolkitError:
            pass
