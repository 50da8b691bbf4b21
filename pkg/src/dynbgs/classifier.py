"""Foreground/background decision by sample consensus.

A sample matches when its summed L1 colour distance is below
``C * r0_color * R`` and its summed LBSP hamming distance is below
``C * (2**R + r0_lbsp)``. Fewer than ``min_matches`` matches means
foreground (255).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ._kernels import classify_rows
from ._parallel import for_row_bands
from .background_model import BackgroundModel
from .lbsp import pack_codes


@dataclass(frozen=True)
class ThresholdParams:
    r0_color: float = 30.0
    r0_lbsp: float = 3.0
    min_matches: int = 2

    def __post_init__(self):
        if self.r0_color <= 0:
            raise ValueError("r0_color must be positive")
        if self.r0_lbsp < 0:
            raise ValueError("r0_lbsp must be non-negative")
        if self.min_matches < 1:
            raise ValueError("min_matches must be at least 1")


def l1_color(a, b) -> np.ndarray:
    """Sum over channels (last axis) of |a - b|."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    return np.abs(a - b).sum(axis=-1)


def thresholds_at(r: float, params: ThresholdParams = ThresholdParams()) -> Tuple[float, float]:
    return params.r0_color * r, 2.0 ** r + params.r0_lbsp


def classify_with_distance(frame, lbsp, model: BackgroundModel, r_map,
                           params: ThresholdParams = ThresholdParams(), threads: int = 1):
    """Raw mask plus the per-pixel minimum normalized sample distance."""
    h, w, c = frame.shape
    if lbsp.shape != frame.shape or model.shape != (h, w, c) or r_map.shape != (h, w):
        raise ValueError("frame, LBSP map, model and R map must share geometry")
    mask = np.empty((h, w), dtype=np.uint8)
    dmin = np.empty((h, w), dtype=np.float64)
    args = (
        frame, pack_codes(lbsp), model.colors, model.packed,
        np.ascontiguousarray(r_map, dtype=np.float64),
        float(params.r0_color), float(params.r0_lbsp), int(params.min_matches),
        mask, dmin,
    )
    for_row_bands(classify_rows, args, h, threads)
    return mask, dmin


def classify(frame, lbsp, model: BackgroundModel, r_map,
             params: ThresholdParams = ThresholdParams(), threads: int = 1) -> np.ndarray:
    return classify_with_distance(frame, lbsp, model, r_map, params, threads)[0]
