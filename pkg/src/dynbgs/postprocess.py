"""Mask clean-up: opening, closing, then a binary majority (median) filter."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage


@dataclass(frozen=True)
class PostParams:
    open_radius: int = 1
    close_radius: int = 1
    median_size: int = 9
    enabled: bool = True

    def __post_init__(self):
        if self.median_size < 1 or self.median_size % 2 == 0:
            raise ValueError(f"median_size must be odd and >= 1, got {self.median_size}")
        if self.open_radius < 0 or self.close_radius < 0:
            raise ValueError("morphology radii must be non-negative")


def _square(radius: int) -> np.ndarray:
    return np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool)


def _to_mask(fg: np.ndarray) -> np.ndarray:
    return np.where(fg, 255, 0).astype(np.uint8)


def morph_open(mask, radius: int = 1) -> np.ndarray:
    if radius == 0:
        return mask.copy()
    se = _square(radius)
    fg = ndimage.binary_erosion(mask == 255, structure=se, border_value=0)
    return _to_mask(ndimage.binary_dilation(fg, structure=se, border_value=0))


def morph_close(mask, radius: int = 1) -> np.ndarray:
    if radius == 0:
        return mask.copy()
    se = _square(radius)
    fg = ndimage.binary_dilation(mask == 255, structure=se, border_value=0)
    # outside counts as foreground here so closing never strips edge-touching blobs
    return _to_mask(ndimage.binary_erosion(fg, structure=se, border_value=1))


def median_filter(mask, size: int = 9) -> np.ndarray:
    """Majority vote over a size x size window with edge replication."""
    if size == 1:
        return mask.copy()
    votes = (mask == 255).astype(np.int32)
    for axis in (0, 1):  # separable box sum
        votes = ndimage.correlate1d(votes, np.ones(size, dtype=np.int32), axis=axis, mode="nearest")
    return _to_mask(votes > (size * size) // 2)


def postprocess(mask, params: PostParams = PostParams()) -> np.ndarray:
    if not params.enabled:
        return mask.copy()
    out = morph_open(mask, params.open_radius)
    out = morph_close(out, params.close_radius)
    return median_filter(out, params.median_size)
