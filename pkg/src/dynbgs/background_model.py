"""Per-pixel sample-consensus background model.

Each pixel keeps ``n_samples`` (colour, LBSP) pairs. Storage is
pixel-major and channel-planar so one channel of a pixel's samples is
contiguous: colours (H, W, C, N) uint8, LBSP codes packed one uint64 per
sample (H, W, N).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import rng as slots
from ._kernels import init_samples, update_model
from .lbsp import pack_codes, unpack_codes
from .rng import CounterRng

N_SAMPLES = 50

# 8-neighbourhood, (dy, dx)
NEIGHBORS = np.array(
    [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)], dtype=np.int64
)


@dataclass
class BackgroundModel:
    colors: np.ndarray  # (H, W, C, N) uint8
    packed: np.ndarray  # (H, W, N) uint64, see lbsp.pack_codes

    @property
    def n_samples(self) -> int:
        return self.colors.shape[3]

    @property
    def shape(self) -> Tuple[int, int, int]:
        h, w, c, _ = self.colors.shape
        return h, w, c

    def sample_at(self, y: int, x: int, n: int):
        h, w, _ = self.shape
        if not (0 <= n < self.n_samples):
            raise IndexError(f"sample index {n} outside [0, {self.n_samples})")
        if not (0 <= y < h and 0 <= x < w):
            raise IndexError(f"pixel ({y}, {x}) outside {h}x{w} frame")
        return self.colors[y, x, :, n].copy(), unpack_codes(self.packed[y, x, n], self.shape[2])

    def set_sample(self, y: int, x: int, n: int, color, code) -> None:
        self.sample_at(y, x, n)  # bounds check
        self.colors[y, x, :, n] = color
        self.packed[y, x, n] = pack_codes(np.asarray(code, dtype=np.uint16))

    @property
    def codes(self) -> np.ndarray:
        """Unpacked LBSP codes, (H, W, N, C) uint16 (a copy)."""
        return unpack_codes(self.packed, self.shape[2])


def _check_geometry(frame: np.ndarray, *maps) -> None:
    for m in maps:
        if m.shape[:2] != frame.shape[:2]:
            raise ValueError(f"geometry mismatch: {m.shape[:2]} vs {frame.shape[:2]}")


def init_model(frame: np.ndarray, lbsp: np.ndarray, rng: CounterRng,
               n_samples: int = N_SAMPLES) -> BackgroundModel:
    """Fill every sample from a random pixel of the clamped 3x3 neighbourhood."""
    if frame.shape != lbsp.shape:
        raise ValueError(f"frame {frame.shape} and LBSP map {lbsp.shape} differ")
    h, w, c = frame.shape
    colors = np.empty((h, w, c, n_samples), dtype=np.uint8)
    packed = np.empty((h, w, n_samples), dtype=np.uint64)
    init_samples(np.uint64(rng.seed), np.ascontiguousarray(frame), pack_codes(lbsp), colors, packed)
    return BackgroundModel(colors=colors, packed=packed)


def init_picks(rng: CounterRng, shape, n_samples: int = N_SAMPLES) -> np.ndarray:
    """Neighbour index in [0, 9) (row-major 3x3) behind each initial sample."""
    h, w = shape
    return rng.below(0, slots.INIT_OFFSET, 9, (h, w, n_samples))


@dataclass
class UpdateDecisions:
    self_fire: np.ndarray      # (H, W) bool
    self_slot: np.ndarray      # (H, W) int
    neighbor_fire: np.ndarray  # (H, W) bool
    neighbor_dir: np.ndarray   # (H, W) int in [0, 8)
    neighbor_slot: np.ndarray  # (H, W) int


def update_decisions(rng: CounterRng, frame_index: int, t_map: np.ndarray,
                     n_samples: int = N_SAMPLES) -> UpdateDecisions:
    """Draw all stochastic update choices for one frame.

    An update fires when a uniform integer in [0, round(T)) equals zero.
    """
    shape = t_map.shape
    period = np.rint(t_map)
    return UpdateDecisions(
        self_fire=rng.below(frame_index, slots.SELF_GATE, period, shape) == 0,
        self_slot=rng.below(frame_index, slots.SELF_SLOT, n_samples, shape),
        neighbor_fire=rng.below(frame_index, slots.NEIGHBOR_GATE, period, shape) == 0,
        neighbor_dir=rng.below(frame_index, slots.NEIGHBOR_DIR, 8, shape),
        neighbor_slot=rng.below(frame_index, slots.NEIGHBOR_SLOT, n_samples, shape),
    )


def maybe_update(model: BackgroundModel, frame: np.ndarray, lbsp: np.ndarray,
                 mask: np.ndarray, t_map: np.ndarray, rng: CounterRng,
                 frame_index: int, neighbor_diffusion: bool = True) -> None:
    """Stochastically absorb background pixels into the model.

    Each background pixel overwrites one of its own samples with
    probability 1/T and, independently with the same probability, one
    sample of a random 8-neighbour (skipped when that falls off-frame).
    Self-updates land first, then diffusion in ascending source-pixel
    order; the last writer wins. Draws match update_decisions().
    """
    _check_geometry(frame, lbsp, mask, t_map)
    update_model(
        np.uint64(rng.seed), np.uint64(frame_index),
        np.ascontiguousarray(frame), pack_codes(lbsp),
        np.ascontiguousarray(mask), np.rint(t_map),
        model.colors, model.packed, NEIGHBORS, bool(neighbor_diffusion),
    )
