"""Image sequence loading and mask writing.

Frames are numpy arrays of shape (H, W, C) with dtype uint8, C in {1, 3}.
Binary masks and ground-truth label maps are (H, W) uint8 arrays.

Binary PPM/PGM (P6/P5, maxval 255) is handled natively. Other formats
(PNG, JPEG, BMP, ...) go through Pillow when it is installed.
"""

from __future__ import annotations

import os
import queue
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional, Tuple

import numpy as np

PNM_EXTENSIONS = {".ppm", ".pgm", ".pnm"}
PIL_EXTENSIONS = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}
IMAGE_EXTENSIONS = PNM_EXTENSIONS | PIL_EXTENSIONS

CDNET_LABELS = (0, 50, 85, 170, 255)
MIN_FRAME_SIDE = 5


class FrameIOError(Exception):
    """Base class for data errors raised while reading sequences."""


class MissingDirectoryError(FrameIOError):
    pass


class EmptySequenceError(FrameIOError):
    pass


class DecodeError(FrameIOError):
    pass


class UnsupportedFormatError(DecodeError):
    pass


class GeometryMismatchError(FrameIOError):
    pass


class TemporalRoiError(FrameIOError):
    pass


class LabelError(FrameIOError):
    pass


@dataclass
class SequenceSpec:
    input_dir: Path
    gt_dir: Optional[Path] = None
    roi_mask: Optional[np.ndarray] = None
    temporal_roi: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        self.input_dir = Path(self.input_dir)
        if self.gt_dir is not None:
            self.gt_dir = Path(self.gt_dir)
        if self.temporal_roi is not None:
            first, last = self.temporal_roi
            if first > last:
                raise TemporalRoiError(f"temporal ROI start {first} is after end {last}")

    def in_window(self, index: int) -> bool:
        """True if the 1-based frame index is inside the temporal ROI."""
        if self.temporal_roi is None:
            return True
        first, last = self.temporal_roi
        return first <= index <= last


# --------------------------------------------------------------------------
# PNM codec

def _pnm_tokens(data: bytes, count: int) -> Tuple[list, int]:
    """Read `count` whitespace-separated header tokens, skipping comments."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise DecodeError("truncated PNM header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def decode_pnm(data: bytes) -> np.ndarray:
    try:
        tokens, offset = _pnm_tokens(data, 4)
        magic = tokens[0]
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise DecodeError(f"malformed PNM header: {exc}") from None
    if magic == b"P6":
        channels = 3
    elif magic == b"P5":
        channels = 1
    else:
        raise DecodeError(f"unsupported PNM variant {magic!r} (only binary P5/P6)")
    if maxval != 255:
        raise DecodeError(f"unsupported PNM maxval {maxval} (only 255)")
    size = width * height * channels
    raster = data[offset:offset + size]
    if len(raster) != size:
        raise DecodeError(f"PNM raster truncated: expected {size} bytes, got {len(raster)}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, channels).copy()


def encode_pnm(image: np.ndarray) -> bytes:
    image = np.asarray(image, dtype=np.uint8)
    if image.ndim == 2:
        image = image[:, :, None]
    height, width, channels = image.shape
    if channels not in (1, 3):
        raise ValueError(f"cannot encode {channels}-channel image as PNM")
    magic = b"P5" if channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, width, height)
    return header + np.ascontiguousarray(image).tobytes()


# --------------------------------------------------------------------------
# Generic image read/write

def _pil():
    try:
        from PIL import Image
    except ImportError:
        return None
    return Image


def read_image(path) -> np.ndarray:
    """Decode an image file into an (H, W, C) uint8 array."""
    path = Path(path)
    ext = path.suffix.lower()
    if ext in PNM_EXTENSIONS:
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise DecodeError(f"{path}: {exc}") from None
        try:
            return decode_pnm(data)
        except DecodeError as exc:
            raise DecodeError(f"{path}: {exc}") from None
    Image = _pil()
    if Image is None:
        raise UnsupportedFormatError(f"{path}: no decoder for {ext!r} (install Pillow)")
    try:
        with Image.open(path) as im:
            if im.mode not in ("L", "RGB"):
                im = im.convert("RGB")
            arr = np.asarray(im, dtype=np.uint8)
    except Exception as exc:  # Pillow raises a zoo of exception types
        raise DecodeError(f"{path}: {exc}") from None
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr.copy()


def write_image(image: np.ndarray, path) -> None:
    path = Path(path)
    ext = path.suffix.lower()
    if ext in PNM_EXTENSIONS:
        path.write_bytes(encode_pnm(image))
        return
    Image = _pil()
    if Image is None:
        raise UnsupportedFormatError(f"{path}: no encoder for {ext!r} (install Pillow)")
    arr = np.asarray(image, dtype=np.uint8)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    Image.fromarray(arr).save(path)


def default_mask_extension() -> str:
    return ".png" if _pil() is not None else ".pgm"


def write_mask(mask: np.ndarray, path) -> None:
    """Write a {0,255} mask; raises OSError if the directory is missing."""
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {mask.shape}")
    if not np.isin(mask, (0, 255)).all():
        raise ValueError("mask values must be 0 or 255")
    write_image(mask.astype(np.uint8), path)


def read_mask(path) -> np.ndarray:
    return read_image(path)[:, :, 0]


def read_gt(path) -> np.ndarray:
    labels = read_image(path)[:, :, 0]
    bad = ~np.isin(labels, CDNET_LABELS)
    if bad.any():
        values = np.unique(labels[bad])[:5].tolist()
        raise LabelError(f"{path}: ground truth contains non-CDnet labels {values}")
    return labels


def read_roi(path) -> np.ndarray:
    """Load a spatial ROI image as a {0,255} mask (anything > 127 is inside)."""
    img = read_image(path)
    return np.where(img.max(axis=2) > 127, 255, 0).astype(np.uint8)


# --------------------------------------------------------------------------
# Sequences

def list_images(directory, prefix: str = "") -> list:
    directory = Path(directory)
    files = [
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS and p.name.startswith(prefix)
    ]
    return sorted(files, key=lambda p: p.name)


def _frame_paths(spec: SequenceSpec) -> list:
    if not spec.input_dir.is_dir():
        raise MissingDirectoryError(f"input directory not found: {spec.input_dir}")
    paths = list_images(spec.input_dir)
    if not paths:
        raise EmptySequenceError(f"no image files in {spec.input_dir}")
    return paths


def load_sequence(spec: SequenceSpec) -> Iterator[np.ndarray]:
    """Yield frames in filename order.

    Directory problems are raised immediately; decode and geometry errors
    surface while iterating.
    """
    paths = _frame_paths(spec)
    return _iter_frames(paths)


def _iter_frames(paths) -> Iterator[np.ndarray]:
    shape = None
    for path in paths:
        frame = read_image(path)
        if shape is None:
            shape = frame.shape
            h, w = shape[:2]
            if h < MIN_FRAME_SIDE or w < MIN_FRAME_SIDE:
                raise GeometryMismatchError(f"{path}: frame {w}x{h} smaller than 5x5")
        elif frame.shape != shape:
            raise GeometryMismatchError(
                f"{path}: geometry {frame.shape[1]}x{frame.shape[0]}x{frame.shape[2]} "
                f"differs from {shape[1]}x{shape[0]}x{shape[2]}"
            )
        yield frame


def sequence_length(spec: SequenceSpec) -> int:
    return len(_frame_paths(spec))


def gt_paths(spec: SequenceSpec) -> list:
    if spec.gt_dir is None:
        return []
    if not spec.gt_dir.is_dir():
        raise MissingDirectoryError(f"ground-truth directory not found: {spec.gt_dir}")
    return list_images(spec.gt_dir)


def parse_temporal_roi(text: str) -> Tuple[int, int]:
    parts = text.split()
    if len(parts) != 2:
        raise TemporalRoiError(f"temporalROI must hold two integers, got {text!r}")
    try:
        first, last = int(parts[0]), int(parts[1])
    except ValueError:
        raise TemporalRoiError(f"temporalROI must hold two integers, got {text!r}") from None
    if first > last:
        raise TemporalRoiError(f"temporal ROI start {first} is after end {last}")
    return first, last


def load_cdnet_sequence(root) -> SequenceSpec:
    """Build a SequenceSpec from a CDnet sequence directory.

    Layout: input/, optional groundtruth/, ROI.<ext>, temporalROI.txt.
    """
    root = Path(root)
    input_dir = root / "input"
    if not input_dir.is_dir():
        raise MissingDirectoryError(f"{root} has no input/ subdirectory")
    gt_dir = root / "groundtruth"
    roi = None
    for ext in (".bmp", ".png", ".pgm", ".jpg"):
        candidate = root / f"ROI{ext}"
        if candidate.is_file():
            roi = read_roi(candidate)
            break
    temporal = None
    troi = root / "temporalROI.txt"
    if troi.is_file():
        temporal = parse_temporal_roi(troi.read_text())
    return SequenceSpec(
        input_dir=input_dir,
        gt_dir=gt_dir if gt_dir.is_dir() else None,
        roi_mask=roi,
        temporal_roi=temporal,
    )


def mask_filename(index: int, ext: str) -> str:
    return f"bin{index:06d}{ext}"


def prefetch(items: Iterable, depth: int = 2) -> Iterator:
    """Decode ahead on a background thread (one producer, one consumer)."""
    q: "queue.Queue" = queue.Queue(maxsize=max(1, depth))
    done = object()

    def producer():
        try:
            for item in items:
                q.put((item, None))
        except BaseException as exc:
            q.put((None, exc))
        q.put((done, None))

    thread = threading.Thread(target=producer, daemon=True)
    thread.start()
    while True:
        item, exc = q.get()
        if exc is not None:
            raise exc
        if item is done:
            break
        yield item
    thread.join()


def ensure_writable_dir(path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise PermissionError(f"output directory not writable: {path}")
    return path
