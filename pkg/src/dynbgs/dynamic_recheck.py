"""Dynamic-background region detection and false-positive re-checking.

A pixel whose label flips often (high cumulative blink rate) is marked as
dynamic background. Colours seen at likely false positives are collected
into a small per-pixel sample bank; foreground inside the dynamic region
that matches one of those colours is erased.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as slots
from ._kernels import dyn_min_l1_rows, interframe_rows
from ._parallel import for_row_bands
from .lbsp import pack_codes
from .rng import CounterRng

M_SAMPLES = 30


def _same_shape(*arrays) -> None:
    shape = arrays[0].shape[:2]
    for a in arrays[1:]:
        if a.shape[:2] != shape:
            raise ValueError(f"geometry mismatch: {a.shape[:2]} vs {shape}")


@dataclass
class BlinkState:
    tb: np.ndarray
    br: np.ndarray
    dr: np.ndarray
    blink_threshold: float = 0.025
    warmup_frames: int = 100

    @classmethod
    def create(cls, shape, blink_threshold: float = 0.025, warmup_frames: int = 100) -> "BlinkState":
        return cls(
            tb=np.zeros(shape, dtype=np.int64),
            br=np.zeros(shape, dtype=np.float64),
            dr=np.zeros(shape, dtype=np.uint8),
            blink_threshold=blink_threshold,
            warmup_frames=warmup_frames,
        )


def update_blink(state: BlinkState, s_cur: np.ndarray, s_prev: np.ndarray, t: int) -> None:
    if t < 2:
        raise ValueError("blink update needs a previous mask (t >= 2)")
    _same_shape(state.tb, s_cur, s_prev)
    state.tb += s_cur != s_prev
    state.br = state.tb / float(t)
    if t >= state.warmup_frames:
        state.dr = (state.br > state.blink_threshold).astype(np.uint8)
    else:
        state.dr = np.zeros_like(state.dr)


@dataclass
class TemporalState:
    dist_last: np.ndarray
    s_feed: np.ndarray
    alpha_feed: float = 0.04
    dist_gate: float = 0.45
    feed_gate: float = 0.4
    dist_gate_above: bool = True  # False flips the gate to dist_last < dist_gate

    @classmethod
    def create(cls, shape, alpha_feed: float = 0.04, dist_gate: float = 0.45,
               feed_gate: float = 0.4, dist_gate_above: bool = True) -> "TemporalState":
        return cls(
            dist_last=np.zeros(shape, dtype=np.float64),
            s_feed=np.zeros(shape, dtype=np.float64),
            alpha_feed=alpha_feed,
            dist_gate=dist_gate,
            feed_gate=feed_gate,
            dist_gate_above=dist_gate_above,
        )

    def large_change(self) -> np.ndarray:
        if self.dist_gate_above:
            return self.dist_last > self.dist_gate
        return self.dist_last < self.dist_gate


def inter_frame_distance(frame, prev_frame, lbsp, prev_lbsp, threads: int = 1) -> np.ndarray:
    """Colour and LBSP change since the previous frame, normalized to [0, 1]."""
    _same_shape(frame, prev_frame, lbsp, prev_lbsp)
    if frame.shape != prev_frame.shape or lbsp.shape != prev_lbsp.shape:
        raise ValueError("channel count mismatch")
    out = np.empty(frame.shape[:2], dtype=np.float64)
    args = (np.ascontiguousarray(frame), np.ascontiguousarray(prev_frame),
            pack_codes(lbsp), pack_codes(prev_lbsp), out)
    for_row_bands(interframe_rows, args, frame.shape[0], threads)
    return out


def update_temporal(state: TemporalState, frame, prev_frame, lbsp, prev_lbsp, s_prev,
                    threads: int = 1) -> None:
    _same_shape(state.s_feed, frame, s_prev)
    state.dist_last = inter_frame_distance(frame, prev_frame, lbsp, prev_lbsp, threads)
    a = state.alpha_feed
    s_feed = (1.0 - a) * state.s_feed + (a / 255.0) * s_prev.astype(np.float64)
    state.s_feed = np.clip(s_feed, 0.0, 1.0)


def fp_collect_predicate(s_cur, s_prev, state: TemporalState) -> np.ndarray:
    """Blink, large inter-frame change, and no recent object trajectory."""
    return (
        (np.asarray(s_cur) != np.asarray(s_prev))
        & state.large_change()
        & (state.s_feed < state.feed_gate)
    )


@dataclass
class DynamicBgModel:
    colors: np.ndarray   # (H, W, M, C) uint8
    written: np.ndarray  # (H, W, M) bool, slot has ever been written
    dyn_color_threshold: float = 30.0

    @classmethod
    def create(cls, shape, m_samples: int = M_SAMPLES,
               dyn_color_threshold: float = 30.0) -> "DynamicBgModel":
        h, w, c = shape
        return cls(
            colors=np.zeros((h, w, m_samples, c), dtype=np.uint8),
            written=np.zeros((h, w, m_samples), dtype=bool),
            dyn_color_threshold=dyn_color_threshold,
        )

    @property
    def m_samples(self) -> int:
        return self.colors.shape[2]

    @property
    def fill_count(self) -> np.ndarray:
        return self.written.sum(axis=2)


def collect_fp(model: DynamicBgModel, frame, predicate, rng: CounterRng, frame_index: int) -> None:
    _same_shape(model.written, frame, predicate)
    w = predicate.shape[1]
    ys, xs = np.nonzero(predicate)
    k = rng.below_at(frame_index, slots.DYN_SLOT, ys * w + xs, model.m_samples)
    model.colors[ys, xs, k] = frame[ys, xs]
    model.written[ys, xs, k] = True


def recheck(mask, blink: BlinkState, model: DynamicBgModel, frame, threads: int = 1) -> np.ndarray:
    """Erase foreground in the dynamic region that matches a collected colour."""
    _same_shape(mask, blink.dr, model.written, frame)
    candidates = (mask == 255) & (blink.dr == 1)
    out = mask.copy()
    if not candidates.any():
        return out
    # -1 marks pixels that were not candidates or have no written slot
    dist = np.full(mask.shape, -1, dtype=np.int64)
    args = (np.ascontiguousarray(frame), model.colors, model.written, candidates, dist)
    for_row_bands(dyn_min_l1_rows, args, mask.shape[0], threads)
    out[(dist >= 0) & (dist < model.dyn_color_threshold)] = 0
    return out
