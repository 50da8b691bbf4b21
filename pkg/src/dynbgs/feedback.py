"""Per-pixel feedback controllers for the distance threshold scale R and
the model update period T.

All maps are (H, W) float64. Operations mutate the state in place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .background_model import BackgroundModel
from .classifier import ThresholdParams, classify_with_distance


@dataclass
class FeedbackState:
    d_min_short: np.ndarray
    d_min_long: np.ndarray
    v: np.ndarray
    r: np.ndarray
    t_rate: np.ndarray
    alpha_short: float = 0.04
    alpha_long: float = 0.01
    v_decr: float = 0.1
    v_floor: float = 0.1
    d_eps: float = 1e-3
    t_min: float = 2.0
    t_max: float = 256.0

    @classmethod
    def create(cls, shape, **constants) -> "FeedbackState":
        state = cls(
            d_min_short=np.zeros(shape),
            d_min_long=np.zeros(shape),
            v=np.zeros(shape),
            r=np.ones(shape),
            t_rate=np.zeros(shape),
            **constants,
        )
        state.v[...] = state.v_floor
        state.t_rate[...] = state.t_min
        return state

    @property
    def d_min(self) -> np.ndarray:
        """Effective D_min: the larger of the two moving averages."""
        return np.maximum(self.d_min_short, self.d_min_long)

    def check_invariants(self) -> None:
        assert (self.r >= 1.0).all(), "R dropped below 1"
        assert ((self.t_rate >= self.t_min) & (self.t_rate <= self.t_max)).all(), "T out of range"
        assert (self.v >= self.v_floor).all(), "v below floor"
        for d in (self.d_min_short, self.d_min_long):
            assert ((d >= 0.0) & (d <= 1.0)).all(), "D_min out of [0, 1]"


def min_distance(frame, lbsp, model: BackgroundModel, threads: int = 1) -> np.ndarray:
    """Smallest normalized colour/LBSP distance to any sample, per pixel."""
    r = np.ones(frame.shape[:2])
    _, d = classify_with_distance(frame, lbsp, model, r, ThresholdParams(), threads)
    return d


def update_dmin(state: FeedbackState, d) -> None:
    a, b = state.alpha_short, state.alpha_long
    state.d_min_short = state.d_min_short * (1.0 - a) + d * a
    state.d_min_long = state.d_min_long * (1.0 - b) + d * b


def weight(dr, dist_last, s_feed, dist_gate: float = 0.45, feed_gate: float = 0.4,
           dist_gate_above: bool = True) -> np.ndarray:
    dr = np.asarray(dr)
    dist_last = np.asarray(dist_last)
    changed = dist_last > dist_gate if dist_gate_above else dist_last < dist_gate
    suspect = changed & (np.asarray(s_feed) < feed_gate)
    return np.where(dr == 0, 1.0, np.where(suspect, 1.5, 0.8))


def update_v(state: FeedbackState, blinked, w) -> None:
    v = np.where(blinked, state.v + w, state.v - state.v_decr)
    state.v = np.maximum(v, state.v_floor)


def update_r(state: FeedbackState) -> None:
    cap = (1.0 + 2.0 * state.d_min) ** 2
    r = np.where(state.r < cap, state.r + state.v, state.r - 1.0 / state.v)
    state.r = np.maximum(r, 1.0)


def update_t(state: FeedbackState, foreground) -> None:
    d = np.maximum(state.d_min, state.d_eps)
    t = np.where(foreground, state.t_rate + 1.0 / (state.v * d), state.t_rate - state.v / d)
    state.t_rate = np.clip(t, state.t_min, state.t_max)
