"""Local binary similarity patterns and hamming distances.

Bit p of a pixel's code is set when the neighbour at offset p lies within
``t_r * center`` of the centre intensity. Offsets outside the frame are
clamped to the nearest edge pixel. Each channel gets its own 16-bit code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import LBSP_OFFSETS, POPCOUNT16, lbsp_rows
from ._parallel import for_row_bands

OFFSETS = [tuple(int(v) for v in row) for row in LBSP_OFFSETS]


@dataclass(frozen=True)
class LbspParams:
    t_r: float = 0.3

    def __post_init__(self):
        if not 0.0 < self.t_r < 1.0:
            raise ValueError(f"t_r must lie in (0, 1), got {self.t_r}")


def as_frame(frame) -> np.ndarray:
    frame = np.asarray(frame)
    if frame.dtype != np.uint8:
        raise TypeError(f"frames must be uint8, got {frame.dtype}")
    if frame.ndim == 2:
        frame = frame[:, :, None]
    if frame.ndim != 3 or frame.shape[2] not in (1, 3):
        raise ValueError(f"frame must be HxW, HxWx1 or HxWx3, got {frame.shape}")
    return np.ascontiguousarray(frame)


def compute_lbsp(frame, params: LbspParams = LbspParams(), threads: int = 1) -> np.ndarray:
    """Return an (H, W, C) uint16 map of LBSP codes."""
    frame = as_frame(frame)
    out = np.empty(frame.shape, dtype=np.uint16)
    pad = np.pad(frame, ((2, 2), (2, 2), (0, 0)), mode="edge").transpose(2, 0, 1)
    lut = np.floor(params.t_r * np.arange(256.0)).astype(np.int16)
    args = (np.ascontiguousarray(pad), lut, LBSP_OFFSETS, out)
    for_row_bands(lbsp_rows, args, frame.shape[0], threads)
    return out


def pack_codes(lbsp: np.ndarray) -> np.ndarray:
    """Pack per-channel codes into one uint64 (channel c in bits 16c..16c+15)."""
    packed = np.zeros(lbsp.shape[:-1], dtype=np.uint64)
    for c in range(lbsp.shape[-1]):
        packed |= lbsp[..., c].astype(np.uint64) << np.uint64(16 * c)
    return packed


def unpack_codes(packed: np.ndarray, channels: int) -> np.ndarray:
    packed = np.asarray(packed, dtype=np.uint64)
    parts = [(packed >> np.uint64(16 * c)) & np.uint64(0xFFFF) for c in range(channels)]
    return np.stack(parts, axis=-1).astype(np.uint16)


def hamming(a: int, b: int) -> int:
    return ((int(a) ^ int(b)) & 0xFFFF).bit_count()


def hamming_map(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-pixel hamming distance summed over channels."""
    if a.shape != b.shape:
        raise ValueError(f"LBSP map shapes differ: {a.shape} vs {b.shape}")
    return POPCOUNT16[np.bitwise_xor(a, b)].sum(axis=-1, dtype=np.int64)


def hamming_px(a: np.ndarray, b: np.ndarray, y: int, x: int) -> int:
    if a.shape != b.shape:
        raise ValueError(f"LBSP map shapes differ: {a.shape} vs {b.shape}")
    return int(sum(hamming(ca, cb) for ca, cb in zip(a[y, x], b[y, x])))
