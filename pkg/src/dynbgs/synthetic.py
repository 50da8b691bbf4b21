"""Deterministic synthetic sequences with exact ground truth.

Kinds:
  static_noise  constant background plus Gaussian sensor noise
  moving_box    static_noise plus a solid box translating with toroidal wraparound
  dynamic_band  static_noise plus a band of rows whose pixels flip between two
                colours at random ("shaking leaves"); the band is background
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .frame_io import write_image

KINDS = ("static_noise", "moving_box", "dynamic_band")

Color = Tuple[int, int, int]


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str = "static_noise"
    width: int = 320
    height: int = 240
    frames: int = 300
    noise_sigma: float = 2.0
    seed: int = 0
    channels: int = 3
    base_color: Color = (128, 128, 128)
    # moving_box
    box_size: Tuple[int, int] = (40, 40)  # (width, height)
    box_velocity: Tuple[int, int] = (2, 0)  # (dx, dy) pixels per frame
    box_origin: Optional[Tuple[int, int]] = None  # (x, y) at frame 1; default left edge, centred
    box_color: Color = (220, 60, 60)
    box_first_frame: int = 2
    # dynamic_band
    band_top: Optional[int] = None  # default: centred
    band_height: int = 60
    band_colors: Tuple[Color, Color] = ((40, 40, 40), (220, 220, 220))
    flip_prob: float = 0.3

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown synthetic kind {self.kind!r}; expected one of {KINDS}")
        if self.width < 5 or self.height < 5:
            raise ValueError("synthetic frames must be at least 5x5")
        if self.frames < 1:
            raise ValueError("need at least one frame")
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if self.kind == "moving_box":
            bw, bh = self.box_size
            if not (0 < bw <= self.width and 0 < bh <= self.height):
                raise ValueError(f"box {bw}x{bh} does not fit a {self.width}x{self.height} frame")
        if self.kind == "dynamic_band":
            top = self.band_top_row
            if self.band_height < 1 or top < 0 or top + self.band_height > self.height:
                raise ValueError("band rows fall outside the frame")
            if not 0.0 <= self.flip_prob <= 1.0:
                raise ValueError("flip_prob must lie in [0, 1]")

    @property
    def band_top_row(self) -> int:
        if self.band_top is not None:
            return self.band_top
        return (self.height - self.band_height) // 2

    @property
    def band_rows(self) -> slice:
        return slice(self.band_top_row, self.band_top_row + self.band_height)

    def box_position(self, index: int) -> Tuple[int, int]:
        """Top-left (x, y) of the box at 1-based frame index, before wrapping."""
        x0, y0 = self.box_origin if self.box_origin is not None else (
            0, (self.height - self.box_size[1]) // 2)
        k = index - self.box_first_frame
        return x0 + self.box_velocity[0] * k, y0 + self.box_velocity[1] * k


def _color(c: Color, channels: int) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    return c[:1] if channels == 1 else c


def iter_sequence(spec: SyntheticSpec) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Yield (frame, gt) pairs; gt uses 0 (background) and 255 (motion)."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    h, w, nc = spec.height, spec.width, spec.channels
    base = np.broadcast_to(_color(spec.base_color, nc), (h, w, nc))
    state = None
    if spec.kind == "dynamic_band":
        state = rng.random((spec.band_height, w)) < 0.5
        colors = np.stack([_color(spec.band_colors[0], nc), _color(spec.band_colors[1], nc)])
    for index in range(1, spec.frames + 1):
        clean = base.copy()
        gt = np.zeros((h, w), dtype=np.uint8)
        if spec.kind == "moving_box" and index >= spec.box_first_frame:
            x, y = spec.box_position(index)
            bw, bh = spec.box_size
            rows = np.arange(y, y + bh) % h
            cols = np.arange(x, x + bw) % w
            clean[np.ix_(rows, cols)] = _color(spec.box_color, nc)
            gt[np.ix_(rows, cols)] = 255
        elif spec.kind == "dynamic_band":
            if index > 1:
                state ^= rng.random(state.shape) < spec.flip_prob
            clean[spec.band_rows] = colors[state.astype(np.int64)]
        noise = rng.normal(0.0, spec.noise_sigma, (h, w, nc)) if spec.noise_sigma > 0 else 0.0
        frame = np.clip(np.rint(clean + noise), 0, 255).astype(np.uint8)
        yield frame, gt


def generate(spec: SyntheticSpec) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    frames, gts = [], []
    for frame, gt in iter_sequence(spec):
        frames.append(frame)
        gts.append(gt)
    return frames, gts


def write_sequence(spec: SyntheticSpec, root, ext: str = ".ppm") -> Path:
    """Write a CDnet-layout directory: input/, groundtruth/, temporalROI.txt."""
    root = Path(root)
    (root / "input").mkdir(parents=True, exist_ok=True)
    (root / "groundtruth").mkdir(parents=True, exist_ok=True)
    gt_ext = ".pgm" if ext in (".ppm", ".pgm", ".pnm") else ext
    in_ext = ".pgm" if (ext == ".ppm" and spec.channels == 1) else ext
    for index, (frame, gt) in enumerate(iter_sequence(spec), start=1):
        write_image(frame, root / "input" / f"in{index:06d}{in_ext}")
        write_image(gt, root / "groundtruth" / f"gt{index:06d}{gt_ext}")
    (root / "temporalROI.txt").write_text(f"1 {spec.frames}\n")
    return root
