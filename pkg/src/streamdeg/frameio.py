"""Codec-free video I/O: binary PGM sequences, uncompressed Y4M, JSON manifests.

Every format here is byte-exact and trivially inspectable, so attacked
sequences can be golden-tested and round-tripped without a codec in the
loop. The pixel model is 8-bit grayscale throughout; color input (Y4M
4:2:0) is collapsed to its luma plane at parse time.

File grammars
-------------
PGM (binary, P5):   ``P5\\n<width> <height>\\n255\\n`` + width*height raw
                    bytes. ``#`` comments are tolerated between header
                    tokens on read and never emitted.
Y4M:                ``YUV4MPEG2 W<w> H<h> F<num>:<den> Ip A1:1 Cmono\\n``
                    followed by ``FRAME\\n`` + w*h luma bytes per frame.
                    On read, ``C420*`` streams are accepted and their
                    chroma planes discarded.
Labels:             UTF-8 text, one ``0`` or ``1`` per line.
Manifest:           JSON object with keys fps, width, height, frames,
                    labels, format. ``frames`` is a list of file names, a
                    ``{"pattern": "frame_%06d.pgm", "count": N}`` object,
                    or a single file name for the y4m format. ``fps`` is
                    an integer or an exact ``"num/den"`` string.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import (
    BadSignature,
    DimensionMismatch,
    IoFailure,
    LabelLengthMismatch,
    MalformedManifest,
    MalformedStream,
    MissingFile,
    TruncatedFrame,
    UnsupportedColorspace,
    ValidationError,
)

FORMAT_PGM_DIR = "pgm_dir"
FORMAT_Y4M = "y4m"

_PGM_MAGIC = b"P5"
_Y4M_MAGIC = b"YUV4MPEG2"
_FRAME_MAGIC = b"FRAME"


@dataclass
class Frame:
    """One 8-bit grayscale frame.

    ``pixels`` is a (height, width) uint8 array, row-major. ``res_factor``
    is 1 for a native frame; r >= 2 marks a frame that was degraded
    in-place by an r x r box filter (the array keeps its original
    dimensions either way).
    """

    pixels: np.ndarray
    res_factor: int = 1

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8:
            raise ValidationError(f"frame pixels must be uint8, got {px.dtype}")
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValidationError(f"frame pixels must be 2-D and non-empty, got shape {px.shape}")
        if self.res_factor < 1:
            raise ValidationError(f"res_factor must be >= 1, got {self.res_factor}")
        self.pixels = px

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def copy(self) -> "Frame":
        return Frame(self.pixels.copy(), self.res_factor)


def validate_labels(values, n_frames: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValidationError("labels must be a 1-D sequence")
    if len(arr) != n_frames:
        raise LabelLengthMismatch(f"{len(arr)} labels for {n_frames} frames")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValidationError("labels must contain only 0 and 1")
    return arr


@dataclass
class VideoSequence:
    """Ordered frames with a frame rate and a per-frame anomaly label track."""

    fps: Fraction
    frames: list[Frame]
    labels: np.ndarray

    def __post_init__(self):
        self.fps = Fraction(self.fps)
        if self.fps <= 0:
            raise ValidationError(f"fps must be positive, got {self.fps}")
        if not self.frames:
            raise ValidationError("a video needs at least one frame")
        w, h = self.frames[0].width, self.frames[0].height
        for i, fr in enumerate(self.frames):
            if fr.width != w or fr.height != h:
                raise DimensionMismatch(
                    f"frame {i} is {fr.width}x{fr.height}, expected {w}x{h}")
        self.labels = validate_labels(self.labels, len(self.frames))

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    def copy(self) -> "VideoSequence":
        return VideoSequence(self.fps, [f.copy() for f in self.frames], self.labels.copy())


# ---------------------------------------------------------------------------
# PGM
# ---------------------------------------------------------------------------

def pgm_bytes(pixels: np.ndarray) -> bytes:
    h, w = pixels.shape
    return b"P5\n%d %d\n255\n" % (w, h) + pixels.tobytes()


def parse_pgm(data: bytes) -> np.ndarray:
    """Parse a binary (P5) PGM into a (height, width) uint8 array."""
    pos = 0

    def next_token():
        nonlocal pos
        while pos < len(data):
            c = data[pos:pos + 1]
            if c == b"#":
                nl = data.find(b"\n", pos)
                pos = len(data) if nl < 0 else nl + 1
            elif c.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if pos == start:
            raise TruncatedFrame("PGM header ends prematurely")
        return data[start:pos]

    if next_token() != _PGM_MAGIC:
        raise BadSignature("not a binary PGM (P5) file")
    try:
        width = int(next_token())
        height = int(next_token())
        maxval = int(next_token())
    except ValueError as e:
        raise MalformedStream(f"bad PGM header token: {e}") from None
    if width < 1 or height < 1:
        raise MalformedStream(f"bad PGM dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedColorspace(f"only 8-bit PGM supported, maxval={maxval}")
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise TruncatedFrame("PGM raster missing")
    pos += 1
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise TruncatedFrame(f"PGM raster has {len(raster)} of {width * height} bytes")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path, pixels: np.ndarray) -> None:
    try:
        Path(path).write_bytes(pgm_bytes(pixels))
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def read_pgm(path) -> np.ndarray:
    p = Path(path)
    if not p.is_file():
        raise MissingFile(str(p))
    try:
        data = p.read_bytes()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    return parse_pgm(data)


# ---------------------------------------------------------------------------
# Y4M
# ---------------------------------------------------------------------------

def y4m_bytes(video: VideoSequence) -> bytes:
    header = b"YUV4MPEG2 W%d H%d F%d:%d Ip A1:1 Cmono\n" % (
        video.width, video.height, video.fps.numerator, video.fps.denominator)
    parts = [header]
    for fr in video.frames:
        parts.append(b"FRAME\n")
        parts.append(fr.pixels.tobytes())
    return b"".join(parts)


def parse_y4m(data: bytes) -> VideoSequence:
    """Parse a YUV4MPEG2 byte stream (mono or 4:2:0; chroma is discarded).

    Never reads past the end of ``data``; any structural defect raises a
    FormatError subclass rather than an unchecked exception.
    """
    if not data.startswith(_Y4M_MAGIC):
        raise BadSignature("missing YUV4MPEG2 signature")
    nl = data.find(b"\n")
    if nl < 0:
        raise TruncatedFrame("stream header is not newline-terminated")
    params = data[len(_Y4M_MAGIC):nl].split()
    width = height = None
    fps = None
    colorspace = b"420"  # y4m default when no C parameter is present
    for tok in params:
        key, val = tok[:1], tok[1:]
        try:
            if key == b"W":
                width = int(val)
            elif key == b"H":
                height = int(val)
            elif key == b"F":
                num, den = val.split(b":")
                fps = Fraction(int(num), int(den))
            elif key == b"C":
                colorspace = val
            # Ip/A/X parameters are tolerated and ignored
        except (ValueError, ZeroDivisionError) as e:
            raise MalformedStream(f"bad header parameter {tok!r}: {e}") from None
    if width is None or height is None or fps is None:
        raise MalformedStream("header must declare W, H and F")
    if width < 1 or height < 1 or fps <= 0:
        raise MalformedStream(f"bad geometry/rate W{width} H{height} F{fps}")

    ysize = width * height
    if colorspace == b"mono":
        chroma = 0
    elif colorspace.startswith(b"420"):
        if width % 2 or height % 2:
            raise UnsupportedColorspace("4:2:0 input requires even dimensions")
        chroma = 2 * (width // 2) * (height // 2)
    else:
        raise UnsupportedColorspace(f"colorspace {colorspace!r} (only mono and 4:2:0)")

    frames = []
    pos = nl + 1
    while pos < len(data):
        if data[pos:pos + len(_FRAME_MAGIC)] != _FRAME_MAGIC:
            raise TruncatedFrame(f"expected FRAME marker at byte {pos}")
        fnl = data.find(b"\n", pos)
        if fnl < 0:
            raise TruncatedFrame("FRAME header is not newline-terminated")
        payload = data[fnl + 1:fnl + 1 + ysize + chroma]
        if len(payload) != ysize + chroma:
            raise TruncatedFrame(
                f"frame {len(frames)} has {len(payload)} of {ysize + chroma} payload bytes")
        luma = np.frombuffer(payload[:ysize], dtype=np.uint8).reshape(height, width).copy()
        frames.append(Frame(luma))
        pos = fnl + 1 + ysize + chroma
    if not frames:
        raise TruncatedFrame("stream contains no frames")
    return VideoSequence(fps, frames, np.zeros(len(frames), dtype=np.uint8))


# ---------------------------------------------------------------------------
# Labels
# ---------------------------------------------------------------------------

def write_labels(path, labels: np.ndarray) -> None:
    text = "".join(f"{int(v)}\n" for v in labels)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def read_labels(path, n_frames: int) -> np.ndarray:
    p = Path(path)
    if not p.is_file():
        raise MissingFile(str(p))
    try:
        lines = p.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    values = []
    for i, line in enumerate(lines):
        s = line.strip()
        if not s:
            continue
        if s not in ("0", "1"):
            raise MalformedManifest(f"{path}:{i + 1}: label must be 0 or 1, got {s!r}")
        values.append(int(s))
    if len(values) != n_frames:
        raise LabelLengthMismatch(f"{len(values)} labels for {n_frames} frames")
    return np.asarray(values, dtype=np.uint8)


# ---------------------------------------------------------------------------
# Manifest
# ---------------------------------------------------------------------------

def _fps_to_json(fps: Fraction):
    if fps.denominator == 1:
        return fps.numerator
    return f"{fps.numerator}/{fps.denominator}"


def _fps_from_json(value) -> Fraction:
    try:
        if isinstance(value, bool):
            raise ValueError("boolean is not a frame rate")
        if isinstance(value, int):
            fps = Fraction(value)
        elif isinstance(value, str):
            num, _, den = value.partition("/")
            fps = Fraction(int(num), int(den)) if den else Fraction(int(num))
        elif isinstance(value, (list, tuple)) and len(value) == 2:
            fps = Fraction(int(value[0]), int(value[1]))
        else:
            raise ValueError(f"unsupported fps value {value!r}")
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise MalformedManifest(f"bad fps: {e}") from None
    if fps <= 0:
        raise MalformedManifest(f"fps must be positive, got {fps}")
    return fps


@dataclass
class Manifest:
    """Loader description for a stored sequence (see module docstring)."""

    fps: Fraction
    width: int
    height: int
    frames: object  # list[str] | {"pattern","count"[,"start"]} | str (y4m)
    labels: str | None
    format: str

    def to_dict(self) -> dict:
        return {
            "fps": _fps_to_json(self.fps),
            "width": self.width,
            "height": self.height,
            "frames": self.frames,
            "labels": self.labels,
            "format": self.format,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Manifest":
        if not isinstance(d, dict):
            raise MalformedManifest("manifest must be a JSON object")
        missing = {"fps", "width", "height", "frames", "format"} - set(d)
        if missing:
            raise MalformedManifest(f"manifest missing keys: {sorted(missing)}")
        fmt = d["format"]
        if fmt not in (FORMAT_PGM_DIR, FORMAT_Y4M):
            raise MalformedManifest(f"unknown format {fmt!r}")
        try:
            width, height = int(d["width"]), int(d["height"])
        except (TypeError, ValueError) as e:
            raise MalformedManifest(f"bad dimensions: {e}") from None
        if width < 1 or height < 1:
            raise MalformedManifest(f"bad dimensions {width}x{height}")
        labels = d.get("labels")
        if labels is not None and not isinstance(labels, str):
            raise MalformedManifest("labels must be a file name or null")
        return cls(_fps_from_json(d["fps"]), width, height, d["frames"], labels, fmt)

    def frame_files(self) -> list[str]:
        """Expand the frames entry into an explicit file list."""
        fr = self.frames
        if self.format == FORMAT_Y4M:
            if not isinstance(fr, str):
                raise MalformedManifest("y4m manifest needs a single frames file name")
            return [fr]
        if isinstance(fr, list):
            if not all(isinstance(x, str) for x in fr):
                raise MalformedManifest("frames list must contain file names")
            return list(fr)
        if isinstance(fr, dict):
            try:
                pattern = fr["pattern"]
                count = int(fr["count"])
                start = int(fr.get("start", 0))
                return [pattern % i for i in range(start, start + count)]
            except (KeyError, TypeError, ValueError) as e:
                raise MalformedManifest(f"bad frames pattern: {e}") from None
        raise MalformedManifest(f"unsupported frames entry {type(fr).__name__}")


def load_sequence(manifest_path) -> VideoSequence:
    """Load the sequence a manifest describes; see module docstring for formats.

    A sequence without a labels entry gets an all-zero label track.
    """
    mpath = Path(manifest_path)
    if not mpath.is_file():
        raise MissingFile(str(mpath))
    try:
        doc = json.loads(mpath.read_text(encoding="utf-8"))
    except OSError as e:
        raise IoFailure(f"cannot read {mpath}: {e}") from e
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MalformedManifest(f"{mpath}: {e}") from None
    manifest = Manifest.from_dict(doc)
    base = mpath.parent
    files = manifest.frame_files()

    if manifest.format == FORMAT_Y4M:
        fpath = base / files[0]
        if not fpath.is_file():
            raise MissingFile(str(fpath))
        video = parse_y4m(fpath.read_bytes())
        if video.width != manifest.width or video.height != manifest.height:
            raise DimensionMismatch(
                f"stream is {video.width}x{video.height}, "
                f"manifest says {manifest.width}x{manifest.height}")
        if video.fps != manifest.fps:
            raise MalformedManifest(f"stream rate {video.fps} != manifest fps {manifest.fps}")
        frames = video.frames
    else:
        frames = []
        for name in files:
            px = read_pgm(base / name)
            if px.shape != (manifest.height, manifest.width):
                raise DimensionMismatch(
                    f"{name} is {px.shape[1]}x{px.shape[0]}, "
                    f"manifest says {manifest.width}x{manifest.height}")
            frames.append(Frame(px))

    if len(frames) < 2:
        raise MalformedManifest(f"need at least 2 frames, manifest lists {len(frames)}")
    if manifest.labels is not None:
        labels = read_labels(base / manifest.labels, len(frames))
    else:
        labels = np.zeros(len(frames), dtype=np.uint8)
    return VideoSequence(manifest.fps, frames, labels)


def save_sequence(video: VideoSequence, out_dir, format: str = FORMAT_PGM_DIR) -> Manifest:
    """Write a sequence plus labels and manifest.json; round-trips bit-exactly.

    Frame res_factor metadata is intentionally not persisted: stored frames
    are plain rasters and reload at res_factor 1.
    """
    if format not in (FORMAT_PGM_DIR, FORMAT_Y4M):
        raise ValidationError(f"unknown format {format!r}")
    if len(video) < 2:
        raise ValidationError(f"need at least 2 frames to save, got {len(video)}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoFailure(f"cannot create {out}: {e}") from e

    if format == FORMAT_PGM_DIR:
        pattern = "frame_%06d.pgm"
        for i, fr in enumerate(video.frames):
            write_pgm(out / (pattern % i), fr.pixels)
        frames_entry = {"pattern": pattern, "count": len(video)}
    else:
        try:
            (out / "video.y4m").write_bytes(y4m_bytes(video))
        except OSError as e:
            raise IoFailure(f"cannot write {out / 'video.y4m'}: {e}") from e
        frames_entry = "video.y4m"

    write_labels(out / "labels.txt", video.labels)
    manifest = Manifest(video.fps, video.width, video.height, frames_entry, "labels.txt", format)
    try:
        (out / "manifest.json").write_text(
            json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot write manifest: {e}") from e
    return manifest
